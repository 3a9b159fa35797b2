"""Vertex structures from a commutative algebra with a derivation, and the Zhu transform."""

from fgva import (adjoint_module, borcherds_build, change_variables, check_jacobi_F, check_weak_assoc,
                  check_weak_comm, d_operator, fg_builtin, grading_check, poly_t, upper_triangular, xw_map,
                  zhu_transform)
from fgva.series import log1p_series
from fgva.vertex import vseries_text
from fgva.zhu import t_grading

# Q[t] with d/dt, capped at degree 8
A = poly_t(8)
V = borcherds_build(A, fg_builtin("additive"))
W = borcherds_build(A, fg_builtin("multiplicative"), 6)
print("Y(t, x)t over F_a:", vseries_text(V.Y("t", "t")))
print("Y(t, x)t over F_m:", vseries_text(W.Y("t", "t")))

# A change of variables by log(1 + x) moves the first structure onto the second
C = change_variables(V, log1p_series(8), 6)
print("changed group:", C.group.name, " table:", vseries_text(C.Y("t", "t")))

# The weak axioms and the Jacobi identity
print(check_weak_assoc(V, "t", "t", "t").text())
print(check_weak_comm(V, "t", "t^2").text())
print(check_jacobi_F(V, "t", "t", "t", (-5, 5)).text())
print("D t^2 =", d_operator(V)["t^2"])

# Upper-triangular matrices are associative but not local
U = borcherds_build(upper_triangular(), fg_builtin("additive"))
print(check_weak_comm(U, "E12", "E22", k_max=4).text())
print(check_weak_assoc(U, "E12", "E22", "1").text())

# deg t^n = -n is a grading, deg t^n = +n is not
neg = t_grading(V.labels, -1)
print(grading_check(V, neg).text())
print(grading_check(V, t_grading(V.labels, 1)).text())

# The Zhu transform and its derivation
Z = zhu_transform(V, neg, 4)
print("Y[t, x]t =", vseries_text(Z.Y("t", "t")))
print("D t =", d_operator(Z)["t"])

# The adjoint module becomes x e^z coordinated
X = xw_map(adjoint_module(V), neg, 6)
print("phi =", X.phi.text())
print("X(t, x)1 =", vseries_text(X.Y("t", "1")))
