#include "csflow/coeffs.hpp"

#include <stdexcept>

namespace csflow {

Rational factorial(int n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(f);
}

namespace {

std::vector<Rational> solve_recurrence(int K, int shift) {
    if (K < 0) throw std::invalid_argument("coefficient depth must be >= 0");
    std::vector<Rational> inv_fact(K + shift + 2);
    for (int i = 0; i <= K + shift + 1; ++i) inv_fact[i] = 1 / factorial(i);
    std::vector<Rational> out(K + 1);
    for (int n = 0; n <= K; ++n) {
        Rational r = inv_fact[n + shift];
        for (int k = 0; k < n; ++k) r -= out[k] * inv_fact[n - k + 1];
        out[n] = r;
    }
    return out;
}

} // namespace

std::vector<Rational> c_coeffs(int K) { return solve_recurrence(K, 0); }

std::vector<Rational> d_coeffs(int K) { return solve_recurrence(K, 2); }

Rational bernoulli_from_c(int k) {
    auto c = c_coeffs(2 * k);
    Rational b = factorial(2 * k) * c[2 * k];
    return (k % 2 == 1) ? b : Rational(-b);
}

} // namespace csflow
