"""Command-line interface: batch subcommands emitting canonical reports.

Exit codes: 0 on success, 1 on validation failure or model errors, 2 on
usage errors.  All numeric output goes through the canonical report
serializer, so identical (model, flags, seed) inputs produce byte-identical
reports.  Stochastic subcommands require an explicit ``--seed``.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .born import Effect, EffectDecomposition, effect_probability, gleason_fit, \
    mixture_check, transition_matrix
from .config import Tolerances
from .errors import EpiquantError, ModelError
from .hilbert import HilbertRep, enumerate_gcs
from .measure import OperatorMeasure, StatisticalModel, density_from_prior, \
    posterior_state, predictive_distribution, simulate_sequence
from .modelfile import load_model, model_hash
from .models import validate_assumptions
from .qubit import SingletPair, as_direction, chsh, classical_sign_model, \
    planar_direction
from .reduction import reduce_model_data
from .reports import Report, complex_matrix_payload, real_matrix_payload


def _add_model_arg(sub):
    sub.add_argument("model_pos", nargs="?", metavar="MODEL",
                     help="bundled model name (spin3, triangle6) or file path")
    sub.add_argument("--model", dest="model_opt", metavar="PATH",
                     help="alternative to the positional MODEL")


def _add_common(sub):
    sub.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--tolerance", type=float, default=None,
                     help="override the structural tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epiquant",
        description="Finite experiment models: validation, Hilbert structure, "
                    "transition probabilities, measurement simulation, Bell tests.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("validate", help="check the full assumption set")
    _add_model_arg(p)
    _add_common(p)

    p = subs.add_parser("build", help="build the representation on the common space")
    _add_model_arg(p)
    _add_common(p)

    p = subs.add_parser("born", help="transition matrix between two experiments")
    _add_model_arg(p)
    p.add_argument("--from", dest="from_label", required=True, metavar="LABEL")
    p.add_argument("--to", dest="to_label", required=True, metavar="LABEL")
    _add_common(p)

    p = subs.add_parser("states", help="all state vectors in the common basis")
    _add_model_arg(p)
    _add_common(p)

    p = subs.add_parser("gcs", help="orbit of a seed state under the representation")
    _add_model_arg(p)
    p.add_argument("--state", metavar="LABEL:VALUE",
                   help="seed state (default: reference experiment, first value)")
    _add_common(p)

    p = subs.add_parser("simulate", help="seeded measurement-sequence Monte Carlo")
    _add_model_arg(p)
    p.add_argument("--plan", required=True, metavar="A,B,...",
                   help="comma-separated experiment labels, measured in order")
    p.add_argument("--runs", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--prior", metavar="W1,W2,...",
                   help="prior weights on the reference basis (default uniform)")
    p.add_argument("--readout-noise", type=float, default=0.0,
                   help="symmetric readout error rate applied to every step")
    _add_common(p)

    p = subs.add_parser("gleason-check",
                        help="density-matrix recovery from effect probabilities")
    _add_model_arg(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--states", type=int, default=20, dest="n_states")
    p.add_argument("--effects", type=int, default=8, dest="n_effects")
    _add_common(p)

    p = subs.add_parser("bell", help="CHSH correlations for four directions")
    p.add_argument("--angles", metavar="A,A',B,B'",
                   help="planar angles in degrees, e.g. 0,90,45,135")
    p.add_argument("--directions", metavar="x,y,z;x,y,z;x,y,z;x,y,z",
                   help="four explicit unit 3-vectors (normalized if needed)")
    p.add_argument("--mode", choices=("quantum-analytic", "quantum-sampled", "classical"),
                   default="quantum-analytic")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=None)
    _add_common(p)

    p = subs.add_parser("reduce", help="collapse one experiment's values to orbits")
    _add_model_arg(p)
    p.add_argument("--factor", required=True, metavar="LABEL")
    p.add_argument("--orbits", required=True, metavar="I,J,...",
                   help="orbit indices of the value range to keep")
    p.add_argument("--out-model", metavar="PATH",
                   help="write the reduced model file here")
    _add_common(p)

    return parser


def _resolve_model(parser, args) -> str:
    given = [x for x in (args.model_pos, args.model_opt) if x]
    if len(given) != 1:
        parser.error("give the model exactly once (positional or --model)")
    return given[0]


def _tolerances(args) -> Tolerances:
    if getattr(args, "tolerance", None) is None:
        return Tolerances()
    return Tolerances(structural=args.tolerance)


def _metadata(model=None, seed=None, tolerances=None, mode=None) -> dict:
    return {
        "model_hash": model_hash(model) if model is not None else None,
        "seed": seed,
        "tolerances": (tolerances or Tolerances()).as_dict(),
        "realization_mode": mode,
    }


def _emit(report: Report, args, parser=None) -> None:
    if args.format == "csv":
        if report.main_table() is None:
            message = f"report kind {report.kind!r} has no CSV form; use --format json"
            if parser is not None:
                parser.error(message)
            raise ValueError(message)
        text = report.to_csv()
    else:
        text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_validate(parser, args) -> int:
    model = load_model(_resolve_model(parser, args))
    result = validate_assumptions(model)
    report = Report("validation", result.to_payload(),
                    _metadata(model, tolerances=_tolerances(args)))
    _emit(report, args, parser)
    return 0 if result.ok else 1


def _cmd_build(parser, args) -> int:
    model = load_model(_resolve_model(parser, args))
    tol = _tolerances(args)
    rep = HilbertRep(model, tol)
    group = model.group
    payload = {
        "reference": rep.reference,
        "dimension": rep.dim,
        "group_order": len(group),
        "domain_order": len(rep.representation.domain),
        "realization_mode": rep.realization_mode,
        "uniform_spectrum": rep.uniform_spectrum,
        "residuals": rep.representation.residuals,
        "words": {
            group.elements[g]: [[a, group.elements[h]] for a, h in w]
            for g, w in sorted(rep.representation.words.items())
        },
        "matrices": {
            group.elements[g]: complex_matrix_payload(m)
            for g, m in sorted(rep.representation.matrices.items())
        },
    }
    _emit(Report("build", payload, _metadata(model, tolerances=tol,
                                             mode=rep.realization_mode)), args, parser)
    return 0


def _cmd_born(parser, args) -> int:
    model = load_model(_resolve_model(parser, args))
    tol = _tolerances(args)
    rep = HilbertRep(model, tol)
    for label in (args.from_label, args.to_label):
        if label not in model.labels:
            parser.error(f"unknown experiment {label!r}")
    t = transition_matrix(rep, args.from_label, args.to_label)
    payload = {
        "from": t.from_experiment,
        "to": t.to_experiment,
        "from_values": list(model.catalog[t.from_experiment].values),
        "to_values": list(model.catalog[t.to_experiment].values),
        "matrix": real_matrix_payload(t.entries),
        "row_sums": [float(x) for x in t.entries.sum(axis=1)],
        "column_sums": [float(x) for x in t.entries.sum(axis=0)],
        "realization_mode": t.realization_mode,
    }
    _emit(Report("born", payload, _metadata(model, tolerances=tol,
                                            mode=rep.realization_mode)), args, parser)
    return 0


def _cmd_states(parser, args) -> int:
    model = load_model(_resolve_model(parser, args))
    tol = _tolerances(args)
    rep = HilbertRep(model, tol)
    vectors = {}
    gram_residuals = {}
    for a in model.labels:
        mat = rep.states_matrix(a)
        gram_residuals[a] = float(
            np.abs(mat.conj().T @ mat - np.eye(rep.dim)).max())
        for k, value in enumerate(model.catalog[a].values):
            sv = rep.state(a, k)
            vectors[f"{a}:{value}"] = {
                "coords": [[float(z.real), float(z.imag)] for z in sv.coords],
                "route": sv.route,
            }
    payload = {
        "reference": rep.reference,
        "dimension": rep.dim,
        "vectors": vectors,
        "gram_residuals": gram_residuals,
    }
    _emit(Report("states", payload, _metadata(model, tolerances=tol,
                                              mode=rep.realization_mode)), args, parser)
    return 0


def _cmd_gcs(parser, args) -> int:
    model = load_model(_resolve_model(parser, args))
    tol = _tolerances(args)
    rep = HilbertRep(model, tol)
    if args.state:
        if ":" not in args.state:
            parser.error("--state must look like LABEL:VALUE")
        a, value = args.state.split(":", 1)
        if a not in model.labels or value not in model.catalog[a].values:
            parser.error(f"unknown state {args.state!r}")
        seed_state = rep.state(a, value)
    else:
        seed_state = rep.state(rep.reference, 0)
    result = enumerate_gcs(rep, seed_state, tol=tol.structural)
    payload = {
        "seed_state": [seed_state.experiment,
                       model.catalog[seed_state.experiment].values[seed_state.value_index]],
        "count": result.count,
        "domain_order": len(rep.representation.domain),
        "covers_all_state_vectors": result.covers_all_states,
        "missing": result.missing,
        "vectors": [complex_matrix_payload([v])[0] for v in result.vectors],
        "representatives": result.representatives,
    }
    _emit(Report("gcs", payload, _metadata(model, tolerances=tol,
                                           mode=rep.realization_mode)), args, parser)
    return 0


def _check_seed(parser, seed):
    if seed is None:
        parser.error("--seed is required for this subcommand")
    if seed < 0:
        parser.error("--seed must be a nonnegative integer")
    return seed


def _cmd_simulate(parser, args) -> int:
    _check_seed(parser, args.seed)
    if args.runs < 1:
        parser.error("--runs must be at least 1")
    model = load_model(_resolve_model(parser, args))
    tol = _tolerances(args)
    rep = HilbertRep(model, tol)
    labels = [x.strip() for x in args.plan.split(",") if x.strip()]
    if not labels:
        parser.error("--plan needs at least one experiment label")
    for label in labels:
        if label not in model.labels:
            parser.error(f"unknown experiment {label!r} in plan")
    if args.prior:
        try:
            weights = [float(x) for x in args.prior.split(",")]
        except ValueError:
            parser.error("--prior must be a comma-separated number list")
        initial = density_from_prior(rep, rep.reference, weights)
    else:
        initial = density_from_prior(rep, rep.reference,
                                     [1.0 / rep.dim] * rep.dim)
    if not 0.0 <= args.readout_noise < 1.0:
        parser.error("--readout-noise must be in [0, 1)")
    plan = []
    for label in labels:
        if args.readout_noise > 0:
            sm = StatisticalModel.symmetric_noise(rep, label, args.readout_noise)
        else:
            sm = StatisticalModel.perfect(rep, label)
        plan.append((label, sm))
    trace = simulate_sequence(rep, initial, plan, runs=args.runs, seed=args.seed)
    payload = trace.to_payload()
    # analytic predictive distribution per step, for comparison
    rho = initial
    predictive = []
    for label, sm in plan:
        measure = OperatorMeasure(rep, sm)
        predictive.append({
            "experiment": label,
            "distribution": predictive_distribution(rho, measure),
        })
        rho = posterior_state(rep, rho, label)  # dephasing marginal chain
    payload["predictive"] = predictive
    _emit(Report("simulation", payload,
                 _metadata(model, seed=args.seed, tolerances=tol,
                           mode=rep.realization_mode)), args, parser)
    return 0


def _random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.real(np.trace(rho))


def _random_basis(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _cmd_gleason(parser, args) -> int:
    _check_seed(parser, args.seed)
    if args.n_states < 1:
        parser.error("--states must be at least 1")
    model = load_model(_resolve_model(parser, args))
    tol = _tolerances(args)
    rep = HilbertRep(model, tol)
    d = rep.dim
    n_effects = max(args.n_effects, d * d)
    rng = np.random.default_rng(
        np.random.Philox(key=np.uint64(args.seed)))
    frob_errors = []
    residuals = []
    for _ in range(args.n_states):
        rho = _random_density(rng, d)
        effects = [Effect(EffectDecomposition(_random_basis(rng, d),
                                              rng.uniform(0, 1, size=d)))
                   for _ in range(n_effects)]
        samples = [(e, float(np.real(np.trace(rho @ e.matrix)))) for e in effects]
        fit = gleason_fit(samples)
        frob_errors.append(float(np.linalg.norm(fit.recovered - rho)))
        residuals.append(fit.residual)

    mixture_worst = 0.0
    for _ in range(100):
        rho = _random_density(rng, d)
        e1 = Effect(EffectDecomposition(_random_basis(rng, d),
                                        rng.uniform(0, 1, size=d)))
        e2 = Effect(EffectDecomposition(_random_basis(rng, d),
                                        rng.uniform(0, 1, size=d)))
        mixture_worst = max(mixture_worst, mixture_check(e1, e2, rho))

    # decomposition independence: the same effect matrix through two bases
    decomp_worst = 0.0
    labels = model.labels
    for _ in range(20):
        rho = _random_density(rng, d)
        w = float(rng.uniform(0, 1))
        e_first = Effect.from_basis(rep, labels[0], [w] * d)  # w * identity
        alt = EffectDecomposition(rep.states_matrix(labels[-1]), [w] * d)
        p1 = effect_probability(rho, e_first)
        p2 = effect_probability(rho, e_first, via=alt)
        decomp_worst = max(decomp_worst, abs(p1 - p2))
        eig = EffectDecomposition(*_eig_decomp(e_first.matrix))
        p3 = effect_probability(rho, e_first, via=eig)
        decomp_worst = max(decomp_worst, abs(p1 - p3))

    payload = {
        "states": args.n_states,
        "effects_per_state": n_effects,
        "max_frobenius_error": max(frob_errors),
        "max_fit_residual": max(residuals),
        "mixture_pairs": 100,
        "max_mixture_residual": mixture_worst,
        "max_decomposition_residual": decomp_worst,
    }
    _emit(Report("gleason", payload,
                 _metadata(model, seed=args.seed, tolerances=tol,
                           mode=rep.realization_mode)), args, parser)
    return 0


def _eig_decomp(matrix):
    w, v = np.linalg.eigh(matrix)
    return v, np.clip(w, 0.0, 1.0)


def _parse_directions(parser, args):
    if bool(args.angles) == bool(args.directions):
        parser.error("give exactly one of --angles or --directions")
    if args.angles:
        try:
            degs = [float(x) for x in args.angles.split(",")]
        except ValueError:
            parser.error("--angles must be four comma-separated numbers")
        if len(degs) != 4:
            parser.error("--angles needs exactly four angles: a,a',b,b'")
        return [planar_direction(d) for d in degs]
    chunks = args.directions.split(";")
    if len(chunks) != 4:
        parser.error("--directions needs four semicolon-separated vectors")
    out = []
    for chunk in chunks:
        try:
            vec = np.array([float(x) for x in chunk.split(",")], dtype=float)
        except ValueError:
            parser.error("direction components must be numbers")
        if vec.shape != (3,) or not np.linalg.norm(vec) > 0:
            parser.error("each direction needs three components, not all zero")
        out.append(as_direction(vec / np.linalg.norm(vec)))
    return out


def _cmd_bell(parser, args) -> int:
    a, a2, b, b2 = _parse_directions(parser, args)
    if args.mode != "quantum-analytic":
        _check_seed(parser, args.seed)
        if args.samples < 1:
            parser.error("--samples must be at least 1")
    payload = {
        "mode": args.mode,
        "directions": {
            "a": [float(x) for x in a], "a'": [float(x) for x in a2],
            "b": [float(x) for x in b], "b'": [float(x) for x in b2],
        },
    }
    if args.mode == "quantum-analytic":
        result = chsh(a, a2, b, b2)
        payload.update({
            "correlations": result["E"],
            "S": result["S"],
            "violated": result["violated"],
        })
    elif args.mode == "quantum-sampled":
        pair_dirs = [("ab", a, b), ("ab'", a, b2), ("a'b", a2, b), ("a'b'", a2, b2)]
        singlet = SingletPair()
        corr, errs = {}, {}
        for i, (name, u, v) in enumerate(pair_dirs):
            c, se, _, _ = singlet.sample_correlation(u, v, args.samples,
                                                     seed=args.seed, stream=i)
            corr[name] = c
            errs[name] = se
        s = abs(corr["ab"] - corr["ab'"] + corr["a'b"] + corr["a'b'"])
        payload.update({
            "correlations": corr,
            "standard_errors": errs,
            "samples": args.samples,
            "S": s,
            "violated": s > 2.0,
        })
    else:
        pair_dirs = [("ab", a, b), ("ab'", a, b2), ("a'b", a2, b), ("a'b'", a2, b2)]
        corr, errs = {}, {}
        for i, (name, u, v) in enumerate(pair_dirs):
            c, se = classical_sign_model(u, v, args.samples, seed=args.seed, stream=i)
            corr[name] = c
            errs[name] = se
        s = abs(corr["ab"] - corr["ab'"] + corr["a'b"] + corr["a'b'"])
        payload.update({
            "correlations": corr,
            "standard_errors": errs,
            "samples": args.samples,
            "S": s,
            "violated": s > 2.0,
        })
    _emit(Report("bell", payload, _metadata(seed=args.seed)), args, parser)
    return 0


def _cmd_reduce(parser, args) -> int:
    model = load_model(_resolve_model(parser, args))
    if args.factor not in model.labels:
        parser.error(f"unknown experiment {args.factor!r}")
    try:
        indices = [int(x) for x in args.orbits.split(",") if x.strip() != ""]
    except ValueError:
        parser.error("--orbits must be comma-separated integers")
    from .modelfile import model_from_data
    data, reduced = reduce_model_data(model, args.factor, indices)
    diagnostics = []
    status = "ok"
    try:
        reduced_model = model_from_data(data)
    except ModelError as exc:
        status = "invalid"
        diagnostics.append(str(exc))
        reduced_model = None
    from .reports import canonical_dumps
    text = canonical_dumps(data)
    if args.out_model:
        with open(args.out_model, "w", encoding="utf-8") as fh:
            fh.write(text)
    payload = {
        "factor": args.factor,
        "selected_orbits": list(reduced.selected_orbits),
        "orbit_labels": list(reduced.orbit_labels),
        "value_map": dict(sorted(reduced.value_map.items())),
        "reduced_model_status": status,
        "diagnostics": diagnostics,
        "reduced_model_written_to": args.out_model,
    }
    _emit(Report("reduce", payload, _metadata(model)), args, parser)
    return 0 if status == "ok" else 1


_COMMANDS = {
    "validate": _cmd_validate,
    "build": _cmd_build,
    "born": _cmd_born,
    "states": _cmd_states,
    "gcs": _cmd_gcs,
    "simulate": _cmd_simulate,
    "gleason-check": _cmd_gleason,
    "bell": _cmd_bell,
    "reduce": _cmd_reduce,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](parser, args)
    except EpiquantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
