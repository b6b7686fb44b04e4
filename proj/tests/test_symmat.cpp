#include <catch2/catch_amalgamated.hpp>

#include "fsvm/symmat.hpp"

using namespace fsvm;

namespace {

SymmetricMatrix sym2(double a, double b, double c) {
    Matrix m(2, 2);
    m(0, 0) = a; m(0, 1) = b;
    m(1, 0) = b; m(1, 1) = c;
    return SymmetricMatrix(m);
}

SymmetricMatrix diag(std::initializer_list<double> vals) {
    Matrix m(static_cast<int>(vals.size()), static_cast<int>(vals.size()));
    int i = 0;
    for (double v : vals) { m(i, i) = v; ++i; }
    return SymmetricMatrix(m);
}

SymmetricMatrix random_symmetric(Rng& rng, int n, double scale = 1.0) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * rng.normal();
    return SymmetricMatrix(m);
}

SpdMatrix random_spd(Rng& rng, int n, double lam_lo = 0.1, double lam_hi = 5.0) {
    SymmetricMatrix base = random_symmetric(rng, n);
    EigenDecomposition eig = sym_eig(base);
    for (int k = 0; k < n; ++k) eig.values[k] = rng.uniform(lam_lo, lam_hi);
    std::sort(eig.values.begin(), eig.values.end(), std::greater<>());
    return SpdMatrix::from_eigensystem(std::move(eig), 1e-12);
}

double reconstruction_error(const SymmetricMatrix& a, const EigenDecomposition& eig) {
    Matrix rec = eig.reconstruct();
    double diff = 0.0;
    for (size_t i = 0; i < rec.data.size(); ++i) {
        const double d = rec.data[i] - a.m.data[i];
        diff += d * d;
    }
    return std::sqrt(diff) / std::max(1.0, frobenius_norm(a.m));
}

}  // namespace

TEST_CASE("constructor symmetrizes by averaging") {
    Matrix m(2, 2);
    m(0, 0) = 1.0; m(0, 1) = 3.0;
    m(1, 0) = 1.0; m(1, 1) = 2.0;
    SymmetricMatrix s(m);
    REQUIRE(s(0, 1) == 2.0);
    REQUIRE(s(1, 0) == 2.0);
}

TEST_CASE("sym_eig identity") {
    auto eig = sym_eig(SymmetricMatrix::identity(2));
    REQUIRE(eig.values[0] == Catch::Approx(1.0));
    REQUIRE(eig.values[1] == Catch::Approx(1.0));
}

TEST_CASE("sym_eig 2x2 hand-computed") {
    auto eig = sym_eig(sym2(2.0, 1.0, 2.0));
    REQUIRE(eig.values[0] == Catch::Approx(3.0).margin(1e-12));
    REQUIRE(eig.values[1] == Catch::Approx(1.0).margin(1e-12));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // Columns match (1,1)/sqrt(2), (1,-1)/sqrt(2) up to sign.
    REQUIRE(std::abs(eig.vectors(0, 0) * eig.vectors(1, 0)) ==
            Catch::Approx(inv_sqrt2 * inv_sqrt2).margin(1e-12));
    REQUIRE(eig.vectors(0, 1) * eig.vectors(1, 1) == Catch::Approx(-0.5).margin(1e-12));
}

TEST_CASE("sym_eig diagonal sorted descending") {
    auto eig = sym_eig(diag({5.0, 2.0, 0.0}));
    REQUIRE(eig.values[0] == Catch::Approx(5.0).margin(1e-14));
    REQUIRE(eig.values[1] == Catch::Approx(2.0).margin(1e-14));
    REQUIRE(eig.values[2] == Catch::Approx(0.0).margin(1e-14));
    for (int k = 0; k < 3; ++k) {
        int nonzero = 0;
        for (int i = 0; i < 3; ++i)
            if (std::abs(eig.vectors(i, k)) > 1e-10) ++nonzero;
        REQUIRE(nonzero == 1);
    }
}

TEST_CASE("sym_eig rejects non-finite input") {
    Matrix m(2, 2);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(sym_eig(SymmetricMatrix(m)), input_error);
}

TEST_CASE("sym_eig reconstruction and orthonormality on random matrices") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(12));
        const double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
        SymmetricMatrix a = random_symmetric(rng, n, scale);
        auto eig = sym_eig(a);

        REQUIRE(reconstruction_error(a, eig) <= 1e-10);
        for (int k = 0; k + 1 < n; ++k) REQUIRE(eig.values[k] >= eig.values[k + 1]);
        // V^T V = I
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += eig.vectors(i, k) * eig.vectors(i, l);
                REQUIRE(s == Catch::Approx(k == l ? 1.0 : 0.0).margin(1e-10));
            }
    }
}

TEST_CASE("psd_project floors eigenvalues on a diagonal case") {
    auto spd = psd_project(diag({2.0, -1.0}), 1e-8);
    REQUIRE(spd.mat(0, 0) == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(spd.mat(1, 1) == Catch::Approx(1e-8).margin(1e-15));
    REQUIRE(std::abs(spd.mat(0, 1)) < 1e-12);
    REQUIRE(spd.min_eigenvalue() >= 1e-8);
}

TEST_CASE("psd_project leaves SPD input unchanged") {
    SymmetricMatrix a = sym2(2.0, 0.5, 1.5);
    auto spd = psd_project(a, 1e-8);
    REQUIRE(spd.mat.m.data == a.m.data);  // bitwise pass-through
}

TEST_CASE("psd_project on [[0,1],[1,0]] hand-derived") {
    // Eigenpairs: +1 with (1,1)/sqrt(2), -1 with (1,-1)/sqrt(2).
    // Floored: 1 * v+ v+^T + eps * v- v-^T.
    const double eps = 1e-8;
    auto spd = psd_project(sym2(0.0, 1.0, 0.0), eps);
    REQUIRE(spd.mat(0, 0) == Catch::Approx(0.5 + 0.5 * eps).margin(1e-12));
    REQUIRE(spd.mat(0, 1) == Catch::Approx(0.5 - 0.5 * eps).margin(1e-12));
    REQUIRE(spd.mat(1, 1) == Catch::Approx(0.5 + 0.5 * eps).margin(1e-12));
}

TEST_CASE("psd_project is idempotent") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(6));
        SymmetricMatrix a = random_symmetric(rng, n, std::pow(10.0, rng.uniform(-2.0, 3.0)));
        auto once = psd_project(a, 1e-8);
        auto twice = psd_project(once.mat, 1e-8);
        // Fixed point at the matrix level, hence bit-for-bit identical spectra.
        REQUIRE(twice.mat.m.data == once.mat.m.data);
        REQUIRE(sym_eig(twice.mat).values == sym_eig(once.mat).values);
        // Floored entries sit exactly on eps_pd in both results.
        for (int k = 0; k < n; ++k)
            if (once.eig.values[k] <= 1e-8) REQUIRE(once.eig.values[k] == 1e-8);
    }
}

TEST_CASE("psd_project minimizes Frobenius distance among floored spectra") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3;
        SymmetricMatrix a = random_symmetric(rng, n);
        auto proj = psd_project(a, 1e-8);
        double base = 0.0;
        for (size_t i = 0; i < a.m.data.size(); ++i) {
            const double d = proj.mat.m.data[i] - a.m.data[i];
            base += d * d;
        }
        // Any other choice of eigenvalues >= eps (same eigenvectors) is no closer.
        auto eig = sym_eig(a);
        for (int rep = 0; rep < 20; ++rep) {
            EigenDecomposition alt = eig;
            for (double& lam : alt.values) lam = std::max(lam + rng.uniform(0.0, 0.5), 1e-8);
            Matrix rec = alt.reconstruct();
            double dist = 0.0;
            for (size_t i = 0; i < rec.data.size(); ++i) {
                const double d = rec.data[i] - a.m.data[i];
                dist += d * d;
            }
            REQUIRE(dist >= base - 1e-12);
        }
    }
}

TEST_CASE("spd_inverse identity and diagonal") {
    auto inv = spd_inverse(SpdMatrix::identity(3));
    for (int i = 0; i < 3; ++i) REQUIRE(inv.mat(i, i) == Catch::Approx(1.0).margin(1e-14));

    auto d = psd_project(diag({2.0, 4.0}), 1e-10);
    auto di = spd_inverse(d);
    REQUIRE(di.mat(0, 0) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(di.mat(1, 1) == Catch::Approx(0.25).margin(1e-14));
}

TEST_CASE("spd_inverse multiply-back on random SPD") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        SpdMatrix m = random_spd(rng, n);
        SpdMatrix mi = spd_inverse(m);
        Matrix prod = matmul(m.mat.m, mi.mat.m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                REQUIRE(prod(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-9));
    }
}

TEST_CASE("spd_inverse warns on ill-conditioned input") {
    std::string captured;
    auto previous = warning_sink();
    warning_sink() = [&](const std::string& msg) { captured = msg; };
    auto m = psd_project(diag({1e10, 1e-8}), 1e-8);
    spd_inverse(m);
    warning_sink() = previous;
    REQUIRE(captured.find("condition number") != std::string::npos);
}

TEST_CASE("trace_product basics") {
    REQUIRE(trace_product(SymmetricMatrix::identity(2), SymmetricMatrix::identity(2)) == 2.0);
    REQUIRE(trace_product(diag({1.0, 2.0}), diag({3.0, 4.0})) == 11.0);
    REQUIRE_THROWS_AS(trace_product(diag({1.0}), diag({1.0, 2.0})), input_error);
}

TEST_CASE("trace_product matches explicit matrix product trace") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(8));
        SymmetricMatrix a = random_symmetric(rng, n);
        SymmetricMatrix b = random_symmetric(rng, n);
        Matrix prod = matmul(a.m, b.m);
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += prod(i, i);
        REQUIRE(trace_product(a, b) == Catch::Approx(tr).margin(1e-12 * std::max(1.0, std::abs(tr))));
    }
}

TEST_CASE("trace_product is symmetric and bilinear") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(5));
        SymmetricMatrix a = random_symmetric(rng, n);
        SymmetricMatrix b = random_symmetric(rng, n);
        SymmetricMatrix c = random_symmetric(rng, n);
        const double s = rng.uniform(-2.0, 2.0);

        REQUIRE(trace_product(a, b) == Catch::Approx(trace_product(b, a)).margin(1e-12));

        SymmetricMatrix combo = SymmetricMatrix::zeros(n);
        for (size_t i = 0; i < combo.m.data.size(); ++i)
            combo.m.data[i] = s * b.m.data[i] + c.m.data[i];
        REQUIRE(trace_product(a, combo) ==
                Catch::Approx(s * trace_product(a, b) + trace_product(a, c)).margin(1e-12));
    }
}
