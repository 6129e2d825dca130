// Variational calculus at k = 1: Euler-Lagrange covectors, divergences and
// the Helmholtz test.
#include "jetforms/printer.hpp"
#include "jetforms/secondary.hpp"

#include <iostream>

using namespace jetforms;

int main()
{
    BundleConfig cfg(1, 1, 1); // one independent, one dependent variable

    auto u = FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({0})));
    auto u1 = FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({1})));
    auto vol = top_horizontal(cfg);

    // free Lagrangian L = 1/2 u_x^2 dx
    auto L = u1.wedge(u1).scaled(Rational(1, 2)).wedge(vol);
    std::cout << "L            = " << print_text(L) << "\n";
    std::cout << "el(L)        = " << print_text(euler(L)[0]) << "\n";

    // adding a divergence does not change the covector
    auto shifted = L + total_derivative(MultiIndex({1}), u.wedge(u)).wedge(vol);
    std::cout << "el(L + D f)  = " << print_text(euler(shifted)[0]) << "\n";

    // Helmholtz: u_xx is variational, u u_x is not
    for (auto F : {FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({2}))), u.wedge(u1)}) {
        ModuleElement xi(cfg, scalar_module(cfg));
        xi.set(0, F);
        auto lf = linearization(xi);
        ModuleElement psi(cfg, dual_module(kappa_module(cfg)));
        psi.set(0, F);
        bool variational = d1(SecondaryForm::from_covector(psi)).is_zero();
        std::cout << "F = " << print_text(F) << ": linearization " << print_operator(lf)
                  << (variational ? "  (variational)" : "  (not variational)") << "\n";
    }
    return 0;
}
