#include "csflow/random.hpp"

namespace csflow {

cplx random_complex(Rng& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    double re = u(rng);
    return {re, u(rng)};
}

Eigen::MatrixXcd random_matrix(int rows, int cols, Rng& rng, double scale) {
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = random_complex(rng, scale);
    return m;
}

Eigen::MatrixXcd random_hermitian(int n, Rng& rng, double scale) {
    Eigen::MatrixXcd a = random_matrix(n, n, rng, scale);
    return 0.5 * (a + a.adjoint());
}

RiccatiBlocks random_blocks(int m, int n, RiccatiVariant v, Rng& rng, double scale) {
    RiccatiBlocks b;
    b.eps01 = random_hermitian(m, rng, scale);
    b.eps02 = random_hermitian(n, rng, scale);
    b.epsp = random_matrix(m, n, rng, scale);
    b.epsm = b.epsp.adjoint();
    b.variant = v;
    return b;
}

LinearHamiltonian random_hamiltonian(const Representation& rep, Rng& rng, double scale) {
    LinearHamiltonian h;
    std::uniform_real_distribution<double> u(-scale, scale);
    for (const auto& g : rep.generators) {
        if (h.eps.count(g.label)) continue;
        Element d = dagger(g.element);
        if (d == g.element) {
            h.eps[g.label] = {u(rng), 0.0};
            continue;
        }
        const RepGenerator* partner = nullptr;
        for (const auto& o : rep.generators)
            if (o.element == d) partner = &o;
        if (!partner) continue;
        cplx c = random_complex(rng, scale);
        h.eps[g.label] = c;
        h.eps[partner->label] = std::conj(c);
    }
    return h;
}

CVec random_point(int dim, Rng& rng, double radius) {
    std::uniform_real_distribution<double> r(0.0, 1.0), phi(0.0, 2 * M_PI);
    CVec z(dim);
    for (auto& v : z) {
        double rr = radius * std::sqrt(r(rng));
        v = std::polar(rr, phi(rng));
    }
    return z;
}

} // namespace csflow
