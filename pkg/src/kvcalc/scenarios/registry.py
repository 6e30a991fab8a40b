"""Built-in scenario definitions.

Each scenario is pure data (see model.py); the runner materializes bindings
and executes assertions. Names follow the statement labels used throughout
the docs; docstrings state the mathematical content being verified.
"""
from __future__ import annotations

from .model import Assertion, Scenario

__all__ = ["SCENARIOS", "scenario_names", "get_scenario"]


def A(name: str, probe: str, expect: str = "pass", tolerance=None,
      note: str = "", **args) -> Assertion:
    return Assertion(name=name, probe=probe, args=args, expect=expect,
                     tolerance=tolerance, note=note)


_PLANE2 = {"coords": ["x", "y"], "box": [[-2.0, 2.0], [-2.0, 2.0]]}
_PLANE3 = {"coords": ["x", "y", "z"],
           "box": [[-1.5, 1.5], [-1.5, 1.5], [-1.5, 1.5]]}
# box minus a small disk around the origin; constraint expressions are
# required to be strictly positive on the domain
_PUNCTURED = {"coords": ["x", "y"], "box": [[-2.0, 2.0], [-2.0, 2.0]],
              "constraints": ["x^2 + y^2 - 1/100"]}

_FLAT = {"ambient": {"kind": "flat"}}
_CTX = {"connection": "ambient"}


SCENARIOS: tuple = (

    Scenario(
        name="example_3_1",
        doc="The coboundary of the multiply-by-f endomorphism: the "
            "three-term expansion collapses to -D_X(fY) because the two "
            "rescaling terms cancel.",
        chart=_PLANE2,
        bindings={
            "scalars": {"f": "exp(x) + x*y"},
            "connections": _FLAT,
        },
        context=_CTX,
        assertions=[
            A("three_term_display", "kv_d_scalar_formula",
              scalar="f", form="long",
              note="d(fZ) matches -D_X(fY) + f D_X Y - D_{fX} Y"),
            A("collapsed_display", "kv_d_scalar_formula",
              scalar="f", form="short",
              note="d(fZ) collapses to -D_X(fY)"),
        ],
    ),

    Scenario(
        name="example_3_2",
        doc="The coboundary of ad_Z reduces to the second-covariant-"
            "derivative candidate and is a (1,2)-tensor even though ad_Z "
            "itself is not tensorial.",
        chart=_PLANE2,
        bindings={
            "fields": {"Z": ["x^2 + x*y", "y^2 - 2*x"]},
            "connections": _FLAT,
            "cochains": {
                "adZ": {"kind": "ad", "field": "Z"},
                "cand": {"kind": "coboundary", "field": "Z"},
                "d_adZ": {"kind": "differential", "of": "adZ"},
            },
        },
        context=_CTX,
        assertions=[
            A("reduction", "kv_equal", left="d_adZ", right="cand",
              note="d(ad_Z)(X,Y) = D_X D_Y Z - D_{D_X Y} Z"),
            A("tensorial", "kv_tensorial", cochain="d_adZ",
              note="d(ad_Z) is C-infinity-linear in each slot"),
            A("ad_not_tensorial", "kv_tensorial", cochain="adZ",
              expect="fail",
              note="ad_Z is a first-order operator, not a tensor"),
        ],
    ),

    Scenario(
        name="theorem_3_3_forward",
        doc="Inner 1-cochains have symmetric coboundaries: d(ad_Z) is "
            "symmetric in its two arguments for polynomial Z.",
        chart=_PLANE2,
        bindings={
            "fields": {
                "Z1": ["x^2 - y", "x*y + 1"],
                "Z2": ["2*x*y", "y^2 - x^2"],
                "Z3": ["x^3", "y^3 - x"],
            },
            "connections": _FLAT,
            "cochains": {
                "a1": {"kind": "ad", "field": "Z1"},
                "a2": {"kind": "ad", "field": "Z2"},
                "a3": {"kind": "ad", "field": "Z3"},
                "d1": {"kind": "differential", "of": "a1"},
                "d2": {"kind": "differential", "of": "a2"},
                "d3": {"kind": "differential", "of": "a3"},
            },
        },
        context=_CTX,
        assertions=[
            A("symmetric_1", "kv_symmetric", cochain="d1"),
            A("symmetric_2", "kv_symmetric", cochain="d2"),
            A("symmetric_3", "kv_symmetric", cochain="d3"),
            A("tensorial_1", "kv_tensorial", cochain="d1"),
        ],
    ),

    Scenario(
        name="remark_3_4",
        doc="The identity map is the canonical non-symmetric example: "
            "d(Id) = -D as a 2-cochain and its antisymmetric part is the "
            "reversed bracket [Y,X].",
        chart=_PLANE2,
        bindings={
            "connections": _FLAT,
            "cochains": {
                "ident": {"kind": "identity"},
                "nabla2": {"kind": "connection", "connection": "ambient"},
                "neg_nabla": {"kind": "scale", "of": "nabla2",
                              "factor": -1.0},
                "d_id": {"kind": "differential", "of": "ident"},
            },
        },
        context=_CTX,
        assertions=[
            A("d_id_is_minus_nabla", "kv_equal",
              left="d_id", right="neg_nabla",
              note="d(Id)(X,Y) = -D_X Y"),
            A("not_symmetric", "kv_symmetric", cochain="d_id",
              expect="fail",
              note="d(Id)(X,Y) - d(Id)(Y,X) is nonzero in general"),
            A("antisym_part", "kv_antisym_bracket", cochain="d_id",
              note="d(Id)(X,Y) - d(Id)(Y,X) = [Y,X]"),
        ],
    ),

    Scenario(
        name="prop_4_1",
        doc="d(-Id) = D as 2-cochains and d(D) = 0, certified at exact "
            "rational lattice points so the cancellation is literal zero.",
        chart=_PLANE2,
        bindings={
            "connections": _FLAT,
            "cochains": {
                "ident": {"kind": "identity"},
                "neg_id": {"kind": "scale", "of": "ident", "factor": -1.0},
                "nabla2": {"kind": "connection", "connection": "ambient"},
            },
        },
        context=_CTX,
        assertions=[
            A("d_neg_id_is_nabla", "kv_d_equal", tolerance=1e-12,
              cochain="neg_id", target="nabla2", exact=True,
              note="d(-Id)(X,Y) = D_X Y"),
            A("d_nabla_is_zero", "kv_d_zero", tolerance=1e-12,
              cochain="nabla2", exact=True,
              note="d(D) = d(d(-Id)) = 0"),
        ],
    ),

    Scenario(
        name="thm_4_2_iii_iv",
        doc="Difference cochain of two torsion-free connections: "
            "tensorial, symmetric, coboundary collapses to the directional "
            "difference of covariant derivatives, and the image "
            "characterization via second covariant derivatives.",
        chart=_PLANE2,
        bindings={
            "oneforms": {"w": ["0", "x"]},
            "fields": {"V": ["x^3 - y^2", "x*y^2"]},
            "connections": {
                "ambient": {"kind": "flat"},
                "dconn": {"kind": "deform", "base": "ambient",
                          "cochain": "proj"},
                "dconn_hand": {"kind": "explicit", "entries": [
                    {"upper": 1, "lower": [1, 2], "expr": "x"},
                    {"upper": 1, "lower": [2, 1], "expr": "x"},
                    {"upper": 2, "lower": [2, 2], "expr": "2*x"},
                ]},
            },
            "cochains": {
                "proj": {"kind": "projective", "oneform": "w"},
                "neg_proj": {"kind": "scale", "of": "proj", "factor": -1.0},
                "theta": {"kind": "conn_diff", "connection": "dconn"},
                "adV": {"kind": "ad", "field": "V"},
                "d_adV": {"kind": "differential", "of": "adV"},
                "cand": {"kind": "coboundary", "field": "V"},
            },
        },
        context=_CTX,
        assertions=[
            A("deformation_christoffels", "connections_equal",
              left="dconn", right="dconn_hand",
              note="deformed connection matches hand-computed symbols"),
            A("theta_is_minus_projective", "kv_equal",
              left="theta", right="neg_proj",
              note="ambient minus deformed equals the negated "
                   "symmetrized-form cochain"),
            A("tensorial", "kv_tensorial", cochain="theta"),
            A("symmetric_values", "kv_symmetric", cochain="theta",
              note="theta(X,Y) = theta(Y,X) for torsion-free difference"),
            A("directional_difference", "kv_d_conn_diff_formula",
              cochain="theta",
              note="d theta = (D_Y theta)(X,Z) - (D_X theta)(Y,Z)"),
            A("d_theta_tensorial", "kv_tensorial", cochain="theta",
              of_differential=True),
            A("image_characterization", "kv_equal",
              left="cand", right="d_adV",
              note="second-covariant-derivative candidate equals d(ad_V)"),
        ],
    ),

    Scenario(
        name="prop_4_3_parallel",
        doc="Symmetrized cochain of a parallel 1-form on a 3-D flat chart "
            "is closed.",
        chart=_PLANE3,
        bindings={
            "oneforms": {"w": ["1", "0", "0"]},
            "connections": _FLAT,
            "cochains": {"theta": {"kind": "projective", "oneform": "w"}},
        },
        context=_CTX,
        assertions=[
            A("d_zero", "kv_d_zero", cochain="theta",
              note="parallel form gives d theta = 0"),
            A("nabla_theta_display", "nabla_formula_projective", oneform="w",
              note="(D_X theta)(Y,Z) = (D_X w)(Y)Z + (D_X w)(Z)Y"),
            A("d_theta_display", "kv_d_projective_formula", oneform="w"),
        ],
    ),

    Scenario(
        name="prop_4_3_nonparallel",
        doc="The converse witness: for a non-parallel 1-form the "
            "symmetrized cochain has nonzero coboundary at sampled points.",
        chart=_PLANE3,
        bindings={
            "oneforms": {"w": ["0", "x", "0"]},
            "connections": _FLAT,
            "cochains": {"theta": {"kind": "projective", "oneform": "w"}},
        },
        context=_CTX,
        assertions=[
            A("d_nonzero", "kv_d_zero", cochain="theta", expect="fail",
              note="non-parallel form: d theta has a sampled witness"),
            A("d_theta_display", "kv_d_projective_formula", oneform="w",
              note="expansion formula holds regardless of parallelism"),
        ],
    ),

    Scenario(
        name="prop_4_5_codazzi",
        doc="Scaled-metric cochain -h(X,Y)V with parallel nonvanishing V: "
            "closed exactly when h satisfies the Codazzi coupling, here "
            "with the Hessian metric of exp(x)+exp(y).",
        chart=_PLANE2,
        bindings={
            "fields": {"V": ["1", "0"]},
            "metrics": {"h": {"kind": "from_potential",
                              "potential": "exp(x) + exp(y)"}},
            "connections": _FLAT,
            "cochains": {"theta": {"kind": "dual_projective",
                                   "tensor": "h", "field": "V"}},
        },
        context=_CTX,
        assertions=[
            A("v_parallel", "parallel_field", field="V",
              connection="ambient"),
            A("codazzi_coupling", "codazzi", tensor="h",
              connection="ambient",
              note="(D_X h)(Y,Z) = (D_Y h)(X,Z)"),
            A("d_zero", "kv_d_zero", cochain="theta"),
            A("nabla_theta_display", "nabla_formula_dual_projective",
              tensor="h", field="V",
              note="(D_X theta)(Y,Z) = -(D_X h)(Y,Z) V"),
        ],
    ),

    Scenario(
        name="prop_4_5_noncodazzi",
        doc="The converse witness: diag(1, 1+x^2) violates the Codazzi "
            "coupling and the cochain picks up a nonzero coboundary.",
        chart=_PLANE2,
        bindings={
            "fields": {"V": ["1", "0"]},
            "metrics": {"h": {"kind": "diagonal",
                              "entries": ["1", "1 + x^2"]}},
            "connections": _FLAT,
            "cochains": {"theta": {"kind": "dual_projective",
                                   "tensor": "h", "field": "V"}},
        },
        context=_CTX,
        assertions=[
            A("v_parallel", "parallel_field", field="V",
              connection="ambient"),
            A("codazzi_violated", "codazzi", tensor="h",
              connection="ambient", expect="fail",
              note="d/dx of the yy entry breaks the coupling"),
            A("d_nonzero", "kv_d_zero", cochain="theta", expect="fail"),
        ],
    ),

    Scenario(
        name="def_5_1_involution",
        doc="The conjugate connection: defining identity on random "
            "triples, conjugation is an involution, and the Levi-Civita "
            "connection is self-conjugate.",
        chart=_PLANE2,
        bindings={
            "metrics": {"g": {"kind": "from_potential",
                              "potential": "exp(x) + exp(y)"}},
            "connections": {
                "ambient": {"kind": "flat"},
                "star": {"kind": "conjugate", "of": "ambient",
                         "metric": "g"},
                "lc": {"kind": "levi_civita", "metric": "g"},
                "lc_conj": {"kind": "conjugate", "of": "lc", "metric": "g"},
            },
        },
        context=_CTX,
        assertions=[
            A("defining_identity", "conjugate_identity",
              connection="ambient", conjugate="star", metric="g",
              note="Z g(X,Y) = g(D_Z X, Y) + g(X, D*_Z Y)"),
            A("involution", "conjugate_involution", tolerance=1e-10,
              connection="ambient", metric="g",
              note="conjugating twice returns the original connection"),
            A("lc_self_conjugate", "connections_equal",
              left="lc_conj", right="lc",
              note="metric compatibility makes conjugation trivial"),
        ],
    ),

    Scenario(
        name="lemma_5_2_midpoint",
        doc="Hessian-metric package: the conjugate of the flat connection "
            "is flat and torsion-free, and the midpoint of the pair is the "
            "Levi-Civita connection.",
        chart=_PLANE2,
        bindings={
            "metrics": {"g": {"kind": "from_potential",
                              "potential": "exp(x) + exp(y)"}},
            "connections": {
                "ambient": {"kind": "flat"},
                "star": {"kind": "conjugate", "of": "ambient",
                         "metric": "g"},
                "star_hand": {"kind": "explicit", "entries": [
                    {"upper": 1, "lower": [1, 1], "expr": "1"},
                    {"upper": 2, "lower": [2, 2], "expr": "1"},
                ]},
            },
        },
        context=_CTX,
        assertions=[
            A("codazzi_coupling", "codazzi", tensor="g",
              connection="ambient"),
            A("star_christoffels", "connections_equal",
              left="star", right="star_hand",
              note="conjugate symbols are the constants 1 on the diagonal"),
            A("star_flat", "connection_flat", connection="star"),
            A("star_torsion_free", "connection_torsion_free",
              connection="star"),
            A("midpoint", "midpoint_levi_civita", tolerance=1e-10,
              connection="ambient", metric="g",
              note="(D + D*)/2 is the Levi-Civita connection of g"),
        ],
    ),

    Scenario(
        name="thm_5_3_curvature",
        doc="Coboundary of the conjugate connection against four times "
            "the Riemannian curvature. The diagonal Hessian metric has "
            "flat Levi-Civita connection (both sides vanish); the "
            "three-exponential potential supplies a curved witness.",
        chart=_PLANE2,
        bindings={
            "metrics": {
                "g": {"kind": "from_potential",
                      "potential": "exp(x) + exp(y)"},
                "g2": {"kind": "from_potential",
                       "potential": "exp(x) + exp(y) + exp(x + y)"},
            },
            "connections": {
                "ambient": {"kind": "flat"},
                "star": {"kind": "conjugate", "of": "ambient",
                         "metric": "g"},
                "star2": {"kind": "conjugate", "of": "ambient",
                          "metric": "g2"},
                "lc": {"kind": "levi_civita", "metric": "g"},
                "lc2": {"kind": "levi_civita", "metric": "g2"},
            },
            "cochains": {
                "star_c": {"kind": "connection", "connection": "star"},
                "star2_c": {"kind": "connection", "connection": "star2"},
                "fourR": {"kind": "curvature", "connection": "lc",
                          "factor": 4.0, "swap": True},
                "fourR2": {"kind": "curvature", "connection": "lc2",
                           "factor": 4.0, "swap": True},
                "theta2": {"kind": "conn_diff", "connection": "star2"},
                "neg_theta2": {"kind": "scale", "of": "theta2",
                               "factor": -1.0},
            },
        },
        context=_CTX,
        assertions=[
            A("codazzi_g2", "codazzi", tensor="g2", connection="ambient",
              note="Hessian metrics are Codazzi-coupled with the flat "
                   "connection"),
            A("star2_flat", "connection_flat", connection="star2"),
            A("d_star_4R_diagonal", "kv_d_equal", tolerance=1e-8,
              cochain="star_c", target="fourR",
              note="diagonal-potential case: both sides vanish "
                   "identically"),
            A("diagonal_R_vanishes", "kv_zero", cochain="fourR",
              note="the diagonal Hessian metric is flat, so this case "
                   "of the identity is degenerate"),
            A("d_star_4R_curved", "kv_d_equal", tolerance=1e-8,
              cochain="star2_c", target="fourR2",
              note="d(D*)(X,Y,Z) = 4 R(Y,X) Z with the commutator "
                   "curvature convention"),
            A("curved_R_nonzero", "kv_zero", cochain="fourR2",
              expect="fail",
              note="witness that the curved case is not degenerate"),
            A("quadratic_display", "kv_theta_quadratic",
              cochain="neg_theta2",
              note="d theta = theta(X,theta(Y,Z)) - theta(Y,theta(X,Z)) "
                   "for theta = D* - D; orientation fixed by flatness of "
                   "both connections"),
        ],
    ),

    Scenario(
        name="cor_5_4",
        doc="The degree-3 curvature cochain of the curved Hessian metric "
            "is closed, both directly and via exactness of R = "
            "d(quarter conjugate).",
        chart=_PLANE2,
        bindings={
            "metrics": {"g2": {"kind": "from_potential",
                               "potential": "exp(x) + exp(y) + exp(x + y)"}},
            "connections": {
                "ambient": {"kind": "flat"},
                "star2": {"kind": "conjugate", "of": "ambient",
                          "metric": "g2"},
                "lc2": {"kind": "levi_civita", "metric": "g2"},
            },
            "cochains": {
                "R3": {"kind": "curvature", "connection": "lc2",
                       "factor": 1.0, "swap": False},
                "R3_swapped": {"kind": "curvature", "connection": "lc2",
                               "factor": 1.0, "swap": True},
                "star2_c": {"kind": "connection", "connection": "star2"},
                "quarter_star": {"kind": "scale", "of": "star2_c",
                                 "factor": 0.25},
            },
        },
        context=_CTX,
        assertions=[
            A("R_is_exact", "kv_d_equal", tolerance=1e-8,
              cochain="quarter_star", target="R3_swapped",
              note="R(Y,X)Z = d(D*/4)(X,Y,Z)"),
            A("d_R_zero", "kv_d_zero", tolerance=1e-8, cochain="R3",
              note="d applied to the degree-3 curvature cochain vanishes"),
            A("exactness_route", "kv_d2_zero", cochain="quarter_star",
              tolerance=1e-8,
              note="d(R) = d(d(D*/4)) = 0 by the complex property"),
        ],
    ),

    Scenario(
        name="thm_5_5_harmonic",
        doc="Conformal cochain of a harmonic function on the flat plane: "
            "closed, the deformed connection is flat, and it is the "
            "Levi-Civita connection of the conformally scaled metric. "
            "Run on the punctured chart so the logarithmic potential is "
            "admissible.",
        chart=_PUNCTURED,
        bindings={
            "scalars": {
                "f1": "x*y",
                "f2": "x^2 - y^2",
                "f3": "1/2*ln(x^2 + y^2)",
            },
            "metrics": {"g": {"kind": "euclidean"}},
            "connections": _FLAT,
            "cochains": {
                "t1": {"kind": "conformal", "scalar": "f1", "metric": "g"},
                "t2": {"kind": "conformal", "scalar": "f2", "metric": "g"},
                "t3": {"kind": "conformal", "scalar": "f3", "metric": "g"},
            },
        },
        context=_CTX,
        assertions=[
            A("harmonic_1", "laplacian_equal", tolerance=1e-10,
              scalar="f1", metric="g", value="0"),
            A("harmonic_2", "laplacian_equal", tolerance=1e-10,
              scalar="f2", metric="g", value="0"),
            A("harmonic_3", "laplacian_equal", tolerance=1e-10,
              scalar="f3", metric="g", value="0"),
            A("d_zero_1", "kv_d_zero", cochain="t1"),
            A("d_zero_2", "kv_d_zero", cochain="t2"),
            A("d_zero_3", "kv_d_zero", cochain="t3"),
            A("deformed_flat_1", "deformed_flat", cochain="t1"),
            A("deformed_flat_2", "deformed_flat", cochain="t2"),
            A("deformed_flat_3", "deformed_flat", cochain="t3"),
            A("lc_of_scaled_metric", "deformed_is_lc_conformal",
              scalar="f3", metric="g", cochain="t3",
              note="ambient + theta is the Levi-Civita connection of "
                   "exp(2f) g"),
        ],
    ),

    Scenario(
        name="thm_5_5_nonharmonic",
        doc="Non-harmonic driver f = x^2: the Laplacian is exactly 2, the "
            "frame-component identities expose it with both signs, and "
            "closedness plus flatness of the deformation fail.",
        chart=_PLANE2,
        bindings={
            "scalars": {"f": "x^2"},
            "metrics": {"g": {"kind": "euclidean"}},
            "connections": _FLAT,
            "cochains": {"theta": {"kind": "conformal", "scalar": "f",
                                   "metric": "g"}},
        },
        context=_CTX,
        assertions=[
            A("laplacian_exact", "laplacian_equal", tolerance=0.0,
              scalar="f", metric="g", value="2",
              note="trace of the coordinate Hessian of x^2 is the "
                   "constant 2, exactly"),
            A("component_ijji", "kv_component_identity",
              cochain="theta", metric="g", scalar="f",
              pattern="ijji", sign=1,
              note="g(d theta(e1,e2,e2), e1) = +laplacian"),
            A("component_ijij", "kv_component_identity",
              cochain="theta", metric="g", scalar="f",
              pattern="ijij", sign=-1,
              note="g(d theta(e1,e2,e1), e2) = -laplacian"),
            A("component_ijii_zero", "kv_component_identity",
              cochain="theta", metric="g", scalar="f",
              pattern="ijii", sign=0),
            A("component_ijjj_zero", "kv_component_identity",
              cochain="theta", metric="g", scalar="f",
              pattern="ijjj", sign=0),
            A("d_nonzero", "kv_d_zero", cochain="theta", expect="fail"),
            A("deformation_not_flat", "deformed_flat", cochain="theta",
              expect="fail"),
        ],
    ),

    Scenario(
        name="example_6_2_cocycle",
        doc="On the punctured plane the conformal cochain of the harmonic "
            "log-radius function is a symmetric tensorial cocycle.",
        chart=_PUNCTURED,
        bindings={
            "scalars": {"f": "1/2*ln(x^2 + y^2)"},
            "metrics": {"g": {"kind": "euclidean"}},
            "connections": _FLAT,
            "cochains": {"theta": {"kind": "conformal", "scalar": "f",
                                   "metric": "g"}},
        },
        context=_CTX,
        assertions=[
            A("harmonic", "laplacian_equal", tolerance=1e-10,
              scalar="f", metric="g", value="0"),
            A("cocycle", "kv_d_zero", cochain="theta",
              note="d theta = 0 on the punctured plane"),
            A("symmetric", "kv_symmetric", cochain="theta"),
            A("tensorial", "kv_tensorial", cochain="theta"),
        ],
    ),

    Scenario(
        name="example_6_2_obstruction",
        doc="The cocycle is not a coboundary: any primitive component "
            "would solve the branch Hessian system, but the candidate's "
            "y-derivative jumps by pi across the slit, so it cannot "
            "extend to the punctured plane.",
        chart=_PUNCTURED,
        bindings={
            "connections": _FLAT,
        },
        context=_CTX,
        assertions=[
            A("hessian_upper_branch", "hessian_system", branch="upper",
              note="(x^2+y^2) Hess(u) = [[x, y], [y, -x]] on y > 0"),
            A("hessian_lower_branch", "hessian_system", branch="lower"),
            A("hessian_affine_shift", "hessian_system", branch="upper",
              shift=[0.5, -1.5, 2.0],
              note="the affine ambiguity ax + by + c does not perturb "
                   "the system"),
            A("jump_is_pi", "jump_pi", tolerance=1e-6,
              note="one-sided limits of u_y along x = 2 differ by pi"),
            A("jump_shift_invariant", "jump_pi", tolerance=1e-6,
              shift=[0.5, -1.5, 2.0]),
            A("not_extendable", "non_extendable",
              note="the jump rules out a continuous extension, so no "
                   "global primitive exists"),
        ],
    ),

    Scenario(
        name="appendix_dnabla",
        doc="Twisted exterior derivative on a flat 3-D chart: low-degree "
            "displays, component-route consistency, antisymmetry, the "
            "flat d-squared law, and the curvature identity on the "
            "hyperbolic half-plane.",
        chart=_PLANE3,
        bindings={
            "connections": _FLAT,
            "forms": {
                "s0": {"degree": 0, "terms": [
                    {"idx": [], "target": ["exp(x)*y", "sin(z)",
                                           "x*y*z"]},
                ]},
                "t1": {"degree": 1, "terms": [
                    {"idx": [1], "target": ["x^2", "y", "0"]},
                    {"idx": [2], "target": ["z", "x*y", "1"]},
                    {"idx": [3], "target": ["0", "cos(x)", "y^2"]},
                ]},
            },
        },
        assertions=[
            A("d_squared_degree0", "dnabla_d2_flat",
              form="s0", connection="ambient"),
            A("d_squared_degree1", "dnabla_d2_flat",
              form="t1", connection="ambient"),
            A("degree0_display", "dnabla_degree0_display",
              form="s0", connection="ambient",
              note="d s (X) = D_X s"),
            A("degree1_display", "dnabla_degree1_display",
              form="t1", connection="ambient",
              note="d t (X,Y) = D_X t(Y) - D_Y t(X) - t([X,Y])"),
            A("component_route", "dnabla_consistency",
              form="t1", connection="ambient"),
            A("antisymmetry", "dnabla_antisymmetry",
              form="t1", connection="ambient"),
            A("curvature_identity", "curvature_identity_halfplane",
              tolerance=1e-8,
              note="d(d s) = R wedge s for the y^-2 conformal metric's "
                   "Levi-Civita connection"),
        ],
    ),

    Scenario(
        name="appendix_flat_decomposition",
        doc="On the punctured plane with the flat connection the twisted "
            "derivative splits into two scalar exterior derivatives; the "
            "angular form supplies a closed non-trivial component.",
        chart=_PUNCTURED,
        bindings={
            "connections": _FLAT,
            "forms": {
                "w1": {"degree": 1, "terms": [
                    {"idx": [1], "target": ["-y/(x^2 + y^2)", "0"]},
                    {"idx": [2], "target": ["x/(x^2 + y^2)", "0"]},
                ]},
                "s": {"degree": 0, "terms": [
                    {"idx": [], "target": ["x/(x^2 + y^2)",
                                           "ln(x^2 + y^2)"]},
                ]},
            },
        },
        assertions=[
            A("decomposition_deg1", "dnabla_flat_decomposition",
              tolerance=1e-12, form="w1", connection="ambient",
              note="twisted route and per-component scalar route agree"),
            A("decomposition_deg0", "dnabla_flat_decomposition",
              tolerance=1e-12, form="s", connection="ambient"),
            A("d_squared_deg0", "dnabla_d2_flat",
              form="s", connection="ambient"),
            A("angular_form_closed", "scalar_form_closed",
              degree=1,
              components=["-y/(x^2 + y^2)", "x/(x^2 + y^2)"],
              note="the angular 1-form is closed away from the origin"),
        ],
    ),

    Scenario(
        name="appendix_commuting_lemma",
        doc="A vector field commuting with everything vanishes: "
            "coordinate-field brackets force constant components, the "
            "radial-sum bracket then forces zero; witnesses show each "
            "stage separates the candidates.",
        chart=_PLANE2,
        bindings={
            "fields": {
                "zero": ["0", "0"],
                "const": ["2", "-1"],
                "quad": ["x^2", "0"],
            },
        },
        assertions=[
            A("zero_stage1", "bracket_coordinates_zero", field="zero"),
            A("zero_stage2", "bracket_euler_zero", field="zero"),
            A("zero_is_zero", "field_zero", field="zero"),
            A("const_passes_stage1", "bracket_coordinates_zero",
              field="const",
              note="constant components commute with coordinate fields"),
            A("const_fails_stage2", "bracket_euler_zero", field="const",
              expect="fail",
              note="bracket with the radial sum returns the field itself"),
            A("quad_fails_stage1", "bracket_coordinates_zero",
              field="quad", expect="fail"),
        ],
    ),
)


def scenario_names() -> tuple:
    return tuple(s.name for s in SCENARIOS)


def get_scenario(name: str) -> Scenario:
    for s in SCENARIOS:
        if s.name == name:
            return s
    raise KeyError(name)
