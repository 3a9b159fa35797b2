"""Fields on the Heisenberg Fock space and the vertex algebra they generate."""

from fgva import (assoc_from_p, check_closure_assoc, closure_generate, compatibility_check, fg_builtin, fg_log,
                  heisenberg_example, normalization_check, y_phi_product)
from fgva.fields import heisenberg_commutator_check
from fgva.series import var_series
from fgva.vertex import vseries_text

space, h = heisenberg_example(3, 6)
print("test vectors:", space.labels)
print("h(x)1 =", vseries_text(h("1")))
print("h(x)y1 =", vseries_text(h("y1")))

# [h_m, h_n] = m delta_{m+n,0}
print(heisenberg_commutator_check(space).text())

# h(x1)h(x2) needs (x1 - x2)^2 to clear its principal part
phi = assoc_from_p(fg_builtin("additive"), var_series(), 9)
print(compatibility_check(h, h, "x1^2-2*x1*x2+x2^2", phi).text())
print(compatibility_check(h, h, "x1-x2", phi).text())

# The phi-product Y(h, z)h on the vacuum
prod = y_phi_product(h, h, "x1^2-2*x1*x2+x2^2", phi, 3)
for k, row in sorted(prod.series("1").coeffs.items()):
    print(f"  z^{k}:", vseries_text(row))

# Close {h} under products and check associativity of the result
A = closure_generate([h], phi, depth=2, z_order=3)
print("basis:", A.basis)
V = A.vertex_structure(fg_builtin("additive"))
print(check_closure_assoc(A, V, "h", "h", "1").text())

# Over F_m with phi = x(1 + z) the product is the x e^z one read at log(1 + z)
phim = assoc_from_p(fg_builtin("multiplicative"), var_series(), 9)
print(normalization_check(h, h, "x1^2-2*x1*x2+x2^2", phim, phi, fg_log(fg_builtin("multiplicative"), 10), 4,
                          panel=space.labels[:4]).text())
