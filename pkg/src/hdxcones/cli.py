"""Command-line front end.

Subcommands: build | cone | verify-cone | expansion | report.
Exit codes: 0 success, 2 bad arguments, 3 resource cap exceeded, 4 no cone
exists.  With --json, stdout carries a single JSON document and nothing
else.  Caps come from defaults plus the HDX_CAPS environment variable.
"""

import argparse
import json
import sys
from fractions import Fraction

from .caps import default_caps
from .chains import CoefficientGroup
from .cones import (
    ConeFunction,
    graph_bfs_cone,
    run_filtration,
    solve_cone_linear,
    star_cone,
    subdivision_transport,
    join_cone,
    transport_coefficients,
)
from .errors import HdxError, NoConeError, ResourceCapError
from .fqlinalg import GF, Form, Subspace, hyperbolic_form
from .simplicial import Complex

EXIT_BAD_ARGS = 2
EXIT_CAP = 3
EXIT_NO_CONE = 4


def _freeze(label):
    if isinstance(label, list):
        return tuple(_freeze(x) for x in label)
    return label


def load_complex(path):
    with open(path) as fh:
        data = json.load(fh)
    data["vertices"] = [_freeze(v) for v in data["vertices"]]
    return Complex.from_json_dict(data)


def save_json(data, path, as_stdout):
    text = json.dumps(data, indent=None, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    if as_stdout:
        print(text)
    elif path:
        print(f"wrote {path}")


def subspace_label(S):
    rows = ";".join("".join(format(x, "x") for x in row) for row in S.rows)
    return f"d{S.dim}[{rows}]"


def _label_to_str(lab):
    if isinstance(lab, Subspace):
        return subspace_label(lab)
    return lab


def _stringify_labels(cx):
    return cx.relabeled(_label_to_str)


def _stringify_cone(cone):
    return cone.map_via(_stringify_labels(cone.complex), _label_to_str)


def _rat(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


def _parse_flag_subspaces(F, m, spec_text):
    from .buildings import standard_flag

    if spec_text in (None, "", "none"):
        return ()
    if spec_text == "full":
        return tuple(standard_flag(F, m))
    dims = [int(x) for x in spec_text.split(",") if x.strip()]
    return tuple(standard_flag(F, m, dims))


def _form_from_args(F, args):
    if args.form == "hyperbolic":
        if args.dim % 2:
            raise HdxError("hyperbolic form needs even ambient dimension")
        return hyperbolic_form(F, args.dim // 2)
    with open(args.form) as fh:
        rows = json.load(fh)
    return Form(F, tuple(tuple(F.embed_int(0) + x for x in row) for row in rows))


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------

def _build_complex(args, caps):
    kind = args.kind
    if kind == "simplex":
        return Complex.simplex(args.m), {}
    if kind == "octahedron":
        return Complex.octahedron(), {}
    if kind == "cycle":
        return Complex.cycle(args.m), {}
    from . import buildings, cosets

    if kind == "an-building":
        F = GF(args.q)
        return _stringify_labels(buildings.an_building(F, args.dim, caps)), {}
    if kind == "an-opposition":
        F = GF(args.q)
        E = _parse_flag_subspaces(F, args.dim, args.flag)
        cx = buildings.opposition_an(F, args.dim, E, caps)
        total, qq = buildings.ca_class_margin(F, args.dim, E)
        return _stringify_labels(cx), {"class_margin": [total, qq]}
    if kind in ("cn-building", "cn-opposition"):
        F = GF(args.q)
        form = _form_from_args(F, args)
        if kind == "cn-building":
            return _stringify_labels(buildings.cn_building(F, form, caps)), {}
        E = _perp_closed_flag(F, form, args.flag)
        cx = buildings.opposition_cn(F, form, E, caps)
        return _stringify_labels(cx), {"N_E": buildings.n_of_E(form, E)}
    if kind == "dn-oriflamme":
        F = GF(args.q)
        form = _form_from_args(F, args)
        T, Tt, pairing = buildings.dn_oriflamme(F, form, caps)
        data = {
            "T": _stringify_labels(T).to_json_dict(),
            "T_tilde": _stringify_labels(Tt).to_json_dict(),
            "pairing": [
                [subspace_label(u), subspace_label(w1), subspace_label(w2),
                 subspace_label(c)]
                for u, w1, w2, c in pairing.entries
            ],
        }
        return None, data
    if kind == "kms-sl":
        coeffs = tuple(int(x) for x in args.f.split(","))
        spec = cosets.kms_sl_example(args.n, args.q, coeffs, caps)
        return spec.complex, {"report": spec.report}
    if kind == "unipotent-opposition":
        spec = cosets.unipotent_opposition(args.n, args.q, caps)
        return spec.complex, {"report": spec.report}
    if kind == "coset":
        with open(args.gens) as fh:
            data = json.load(fh)
        from .fqlinalg import parse_field_descriptor

        F = parse_field_descriptor(data["field"])
        gens = [tuple(tuple(r) for r in M) for M in data["generators"]]
        G = cosets.enumerate_group(F, data["degree"], gens, caps)
        subs = [
            G.subgroup([gens[i] for i in idxs]) for idxs in data["subgroups"]
        ]
        spec = cosets.coset_complex(G, subs, caps)
        return spec.complex, {"group_order": G.order}
    raise HdxError(f"unknown build kind {kind!r}")


def _perp_closed_flag(F, form, spec_text):
    if spec_text in (None, "", "none"):
        return ()
    dims = [int(x) for x in spec_text.split(",") if x.strip()]
    members = {}
    for d in dims:
        # lexicographically least totally isotropic subspace of the dimension
        U = min(form.isotropic_subspaces(d), key=lambda s: s.sort_key())
        members[U.rows] = U
        P = form.perp(U)
        members[P.rows] = P
    return tuple(sorted(members.values(), key=lambda s: s.sort_key()))


def cmd_build(args, caps):
    cx, meta = _build_complex(args, caps)
    if cx is None:
        save_json(meta, args.out, args.json)
        return 0
    counts = {str(k): len(cx.faces_of_dim(k)) for k in range(cx.n + 1)}
    data = dict(cx.to_json_dict())
    data["meta"] = {
        "dimension": cx.n,
        "pure": cx.pure,
        "face_counts": counts,
        **meta,
    }
    save_json(data, args.out, args.json)
    return 0


# ---------------------------------------------------------------------------
# cone
# ---------------------------------------------------------------------------

def _emit_cone(cone, args, extra=None):
    """Write the raw cone JSON to --out; report JSON goes to stdout."""
    prof = cone.radius_profile()
    verdict = cone.verify()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(cone.to_json_dict(), fh, sort_keys=True)
            fh.write("\n")
    report = {
        "cone": cone.to_json_dict() if not args.out else args.out,
        "verified": verdict.ok,
        "radius_profile": {str(j): v for j, v in prof.radii},
    }
    if extra:
        report.update(extra)
    if args.json:
        print(json.dumps(report, sort_keys=True))
    elif args.out:
        print(f"wrote {args.out} (verified={verdict.ok}, "
              f"radii={dict(prof.radii)})")
    return 0


def cmd_cone(args, caps):
    group = CoefficientGroup.parse(args.coeff)
    method = args.method
    if method in ("bfs", "solve", "apex"):
        cx = load_complex(args.infile)
        apex = cx.labels[args.apex]
        if method == "bfs":
            cone = graph_bfs_cone(cx, apex)
        elif method == "solve":
            cone = solve_cone_linear(cx, args.k, apex, caps=caps)
        else:
            cone = star_cone(cx, apex, args.k)
        if group.descriptor != "Z":
            cone = transport_coefficients(cone, group)
        return _emit_cone(cone, args)
    if method == "transport":
        cx = load_complex(args.infile)
        with open(args.cone) as fh:
            cone = ConeFunction.from_json_dict(json.load(fh), cx)
        cone = transport_coefficients(cone, group)
        return _emit_cone(cone, args)
    if method == "extend":
        from .cones import extend_by_vertex_set, relative_link

        cx = load_complex(args.infile)
        if not args.sub or not args.w:
            raise HdxError("extend needs --sub and --w vertex index lists")
        sub_labels = [cx.labels[int(i)] for i in args.sub.split(",")]
        subc = cx.full_subcomplex(sub_labels)
        with open(args.cone) as fh:
            base = ConeFunction.from_json_dict(json.load(fh), subc)
        W = [cx.labels[int(i)] for i in args.w.split(",")]
        link_cones = {}
        for w in W:
            rel = relative_link(cx, subc, w)
            if rel.num_vertices == 0:
                raise HdxError(f"relative link of vertex {w!r} is empty")
            need = min(base.k - 1, rel.n)
            link_cones[w] = solve_cone_linear(rel, need, rel.labels[0], caps=caps)
        cone = extend_by_vertex_set(cx, subc, base, W, link_cones)
        if group.descriptor != "Z":
            cone = transport_coefficients(cone, group)
        return _emit_cone(cone, args)
    if method == "join":
        cx1 = load_complex(args.infile)
        cx2 = load_complex(args.infile2)
        with open(args.cone) as fh:
            c1 = ConeFunction.from_json_dict(json.load(fh), cx1)
        with open(args.cone2) as fh:
            c2 = ConeFunction.from_json_dict(json.load(fh), cx2)
        joined = join_cone(c1, c2)
        return _emit_cone(joined, args)
    if method == "filtration":
        from . import buildings

        F = GF(args.q)
        if args.kind == "an-opposition":
            E = _parse_flag_subspaces(F, args.dim, args.flag)
            plan = buildings.an_filtration_plan(F, args.dim, E, caps=caps)
        elif args.kind == "cn-opposition":
            form = _form_from_args(F, args)
            E = _perp_closed_flag(F, form, args.flag)
            plan = buildings.cn_filtration_plan(F, form, E, caps=caps)
        else:
            raise HdxError(f"filtration does not support kind {args.kind!r}")
        cone, ledger = run_filtration(plan)
        cone = _stringify_cone(cone)
        if group.descriptor != "Z":
            cone = transport_coefficients(cone, group)
        return _emit_cone(cone, args, {"ledger": _ledger_jsonable(ledger)})
    if method == "subdivision":
        from . import buildings

        F = GF(args.q)
        form = _form_from_args(F, args)
        if args.flag in (None, "", "none"):
            T, Tt, pairing = buildings.dn_oriflamme(F, form, caps)
        else:
            E = _perp_closed_flag(F, form, args.flag)
            T, Tt, pairing = buildings.opposition_dn(F, form, E, caps)
        base = solve_cone_linear(T, Tt.n - 1, min(T.labels, key=lambda s: s.sort_key()), caps=caps)
        cone = subdivision_transport(base, T, Tt, pairing)
        c = base.radius_profile().max_radius()
        cone = _stringify_cone(cone)
        return _emit_cone(cone, args, {"source_radius": c, "bound": 2 * c})
    raise HdxError(f"unknown cone method {method!r}")


def _ledger_jsonable(ledger):
    def conv(x):
        if isinstance(x, dict):
            return {str(k): conv(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [conv(v) for v in x]
        if isinstance(x, Fraction):
            return _rat(x)
        return x

    return conv(ledger)


def cmd_verify_cone(args, caps):
    cx = load_complex(args.complex)
    with open(args.cone) as fh:
        cone = ConeFunction.from_json_dict(json.load(fh), cx)
    verdict = cone.verify()
    prof = cone.radius_profile()
    save_json(
        {
            "verified": verdict.ok,
            "checked_generators": verdict.checked,
            "failures": [list(map(str, f)) for f in verdict.failures],
            "radius_profile": {str(j): v for j, v in prof.radii},
        },
        args.out,
        args.json,
    )
    return 0 if verdict.ok else 1


# ---------------------------------------------------------------------------
# expansion / report
# ---------------------------------------------------------------------------

def cmd_expansion(args, caps):
    from . import expansion

    cx = load_complex(args.infile)
    mode = args.mode
    if mode == "spectral":
        prof = expansion.local_spectral_profile(cx, caps=caps, skip_oversize=True)
        save_json(
            {
                "lambda": prof.lam,
                "all_links_connected": prof.all_links_connected,
                "verdict": prof.verdict(),
                "links": [
                    {
                        "face": list(labels),
                        "dim": dim,
                        "eigenvalue": eig,
                        "connected": conn,
                    }
                    for labels, dim, eig, conn in prof.entries
                ],
            },
            args.out,
            args.json,
        )
        return 0
    group = CoefficientGroup.parse(args.coeff)
    if mode == "coboundary":
        h, witness = expansion.coboundary_constant(cx, args.k, group, caps=caps)
        save_json(
            {
                "k": args.k,
                "coeff": group.descriptor,
                "h_cb": _rat(h),
                "witness_support": sorted(map(list, witness.support())) if witness else None,
            },
            args.out,
            args.json,
        )
        return 0
    if mode == "cosystolic":
        h, _ = expansion.cosystolic_constant(cx, args.k, group, caps=caps)
        s = expansion.systole(cx, args.k, group, caps=caps)
        save_json(
            {"k": args.k, "coeff": group.descriptor, "h_cs": _rat(h),
             "systole": _rat(s)},
            args.out,
            args.json,
        )
        return 0
    if mode == "bound":
        rad = args.rad
        if args.cone:
            with open(args.cone) as fh:
                cone = ConeFunction.from_json_dict(json.load(fh), cx)
            rad = cone.radius_profile()[args.k]
        if rad is None:
            raise HdxError("bound mode needs --cone or --rad")
        report = expansion.cone_bound_check(
            cx, rad, args.k, group, caps=caps,
            transitive=True if args.transitive else None,
        )
        save_json(
            {
                "k": args.k,
                "radius": rad,
                "bound": _rat(report.bound),
                "h_cb": _rat(report.h_measured),
                "verdict": report.verdict(),
            },
            args.out,
            args.json,
        )
        return 0
    raise HdxError(f"unknown expansion mode {mode!r}")


def cmd_report(args, caps):
    from . import expansion

    cx = load_complex(args.infile)
    rep = expansion.local_to_global_report(cx, args.coeff, caps=caps)
    rep["min_link_coboundary"] = _rat(rep["min_link_coboundary"])
    save_json(rep, args.out, args.json)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="hdxcones",
        description="complexes, cone functions and expansion constants",
    )
    p.add_argument("--threads", type=int, default=1,
                   help="worker hint; results are schedule-independent")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a complex and write JSON")
    b.add_argument("--kind", required=True,
                   choices=["simplex", "octahedron", "cycle", "an-building",
                            "an-opposition", "cn-building", "cn-opposition",
                            "dn-oriflamme", "coset", "kms-sl",
                            "unipotent-opposition"])
    b.add_argument("--m", type=int, default=3, help="size for simplex/cycle")
    b.add_argument("--q", type=int, default=2)
    b.add_argument("--dim", type=int, default=3, help="ambient dimension")
    b.add_argument("--flag", default="none",
                   help="'full', 'none', or comma-separated dimensions")
    b.add_argument("--form", default="hyperbolic",
                   help="'hyperbolic' or a path to a JSON matrix")
    b.add_argument("--n", type=int, default=2)
    b.add_argument("--f", default="1,1,1",
                   help="modulus polynomial coefficients, low to high")
    b.add_argument("--gens", help="JSON file for generic coset builds")
    b.add_argument("--out")
    b.add_argument("--json", action="store_true")
    b.set_defaults(fn=cmd_build)

    c = sub.add_parser("cone", help="synthesize a cone function")
    c.add_argument("--method", required=True,
                   choices=["apex", "bfs", "join", "extend", "filtration",
                            "solve", "transport", "subdivision"])
    c.add_argument("--in", dest="infile")
    c.add_argument("--in2", dest="infile2")
    c.add_argument("--cone")
    c.add_argument("--cone2")
    c.add_argument("--apex", type=int, default=0, help="apex vertex index")
    c.add_argument("--sub", help="subcomplex vertex indices (extend)")
    c.add_argument("--w", help="vertex indices to add (extend)")
    c.add_argument("--k", type=int, default=0)
    c.add_argument("--coeff", default="Z")
    c.add_argument("--kind", help="builder kind for filtration/subdivision")
    c.add_argument("--q", type=int, default=2)
    c.add_argument("--dim", type=int, default=3)
    c.add_argument("--flag", default="full")
    c.add_argument("--form", default="hyperbolic")
    c.add_argument("--out")
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_cone)

    v = sub.add_parser("verify-cone", help="check a cone file against a complex")
    v.add_argument("--complex", required=True)
    v.add_argument("--cone", required=True)
    v.add_argument("--out")
    v.add_argument("--json", action="store_true")
    v.set_defaults(fn=cmd_verify_cone)

    e = sub.add_parser("expansion", help="spectral / coboundary / bound reports")
    e.add_argument("--in", dest="infile", required=True)
    e.add_argument("--mode", required=True,
                   choices=["spectral", "coboundary", "cosystolic", "bound"])
    e.add_argument("--k", type=int, default=0)
    e.add_argument("--coeff", default="2")
    e.add_argument("--cone")
    e.add_argument("--rad", type=int)
    e.add_argument("--transitive", action="store_true",
                   help="assert facet transitivity for the bound hypothesis")
    e.add_argument("--out")
    e.add_argument("--json", action="store_true")
    e.set_defaults(fn=cmd_expansion)

    r = sub.add_parser("report", help="combined local-to-global report")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--coeff", default="2")
    r.add_argument("--out")
    r.add_argument("--json", action="store_true")
    r.set_defaults(fn=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        raise SystemExit(EXIT_BAD_ARGS if e.code not in (0,) else 0)
    caps = default_caps()
    try:
        return args.fn(args, caps)
    except ResourceCapError as e:
        print(f"resource cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except NoConeError as e:
        print(f"no cone exists: {e}", file=sys.stderr)
        if getattr(e, "degree", None) is not None:
            print(f"obstructed degree: {e.degree}", file=sys.stderr)
        return EXIT_NO_CONE
    except HdxError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
