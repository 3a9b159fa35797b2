"""Formal group laws, their logarithms and their associates, step by step."""

from fgva import (assoc_check, assoc_extract_p, assoc_from_p, assoc_transform, fg_builtin, fg_check, fg_conjugate,
                  fg_from_log, fg_log, first_mismatch, phi_from_literal, tanh_law)
from fgva.series import LaurentSeries, log1p_series

Fa = fg_builtin("additive")
Fm = fg_builtin("multiplicative")

# The additive law is its own logarithm; the multiplicative one has log(1 + x)
print("log F_a =", fg_log(Fa))
print("log F_m =", fg_log(Fm, 8))

# Going back from a logarithm rebuilds the law
print("from log(1+x):", fg_from_log(log1p_series(8), 8).text())
print("tanh law:", tanh_law(7).text())

# Conjugating F_a by log(1+x) gives F_m
print("F_a conjugated:", fg_conjugate(Fa, log1p_series(8), 8).text())

# fg_check says what breaks in a non-law
print(fg_check("x + y + x^2").text())

# Associates are built from a series p by exponentiating f(z) p(x) d/dx
x = LaurentSeries({1: 1}, float("inf"), "x")
for F, p in ((Fa, LaurentSeries({2: 1}, float("inf"), "x")), (Fa, x), (Fm, x)):
    a = assoc_from_p(F, p, 6)
    print(f"{F.name:12s} p = {p}:  {a.text()}")
    print("    recovered p =", assoc_extract_p(a))

# x + z is an associate of F_a but not of F_m
plus = phi_from_literal("x + z", 5)
print(assoc_check(plus, Fm).text())

# Retiming and barring x + z both land on F_m, but they disagree at x*z
retimed = assoc_transform(assoc_from_p(Fa, LaurentSeries.constant(1, "x"), 6), log1p_series(7), "retime", order=5)
barred = assoc_transform(assoc_from_p(Fa, LaurentSeries.constant(1, "x"), 6), kind="bar", group=Fm, order=5)
print("retimed:", retimed.text())
print("barred: ", barred.text())
print("first mismatch (x-exp, z-exp, barred, retimed):", first_mismatch(barred, retimed))
