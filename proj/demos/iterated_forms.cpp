// The k = 2 calculus: slot differentials, the swap involution, evolutionary
// fields with odd components and the bracket.
#include "jetforms/printer.hpp"
#include "jetforms/secondary.hpp"

#include <iostream>

using namespace jetforms;

int main()
{
    BundleConfig cfg(1, 1, 2);

    auto u = FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({0})));
    std::cout << "d1 u        = " << print_text(differential(1, SlotKind::Full, u)) << "\n";
    std::cout << "d2 d1 u     = "
              << print_text(differential(2, SlotKind::Full, differential(1, SlotKind::Full, u)))
              << "\n";
    std::cout << "kappa(d1 u) = " << print_text(kappa(2, differential(1, SlotKind::Full, u)))
              << "\n";

    // the field of the first vertical differential and its prolongation
    auto U1 = u_field(cfg, 1);
    std::cout << "U_1         = " << print_kappa_field(U1) << "\n";
    auto theta = FormExpr::generator(cfg, Generator::vertical(1, MultiIndex({0}), SlotSet::of({1})));
    auto E = prolong(U1);
    std::cout << "E_{U_1}(u theta) = " << print_text(apply_derivation(E, u.wedge(theta))) << "\n";
    std::cout << "[U_1, U_1]  = " << print_kappa_field(bracket(U1, U1)) << "\n";

    // a secondary covariant tensor and a failed membership test
    BaseCovector t;
    t.omegas.push_back(theta);
    t.psi.push_back(Coefficient(1));
    auto good = tensor_embed(cfg, t);
    std::cout << "embedded tensor passes: " << std::boolalpha
              << is_secondary_tensor(good.kernel()) << "\n";

    MultiKernel bad(cfg, 1);
    bad.add_entry({SlotKey{kappa_index(cfg, 1, SlotSet::single(1)), MultiIndex({0})}}, theta);
    std::cout << "K-dependent covector passes: " << is_secondary_tensor(bad) << "\n";
    return 0;
}
