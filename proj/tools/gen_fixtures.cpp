// Regenerates the bundled synthetic fixtures under data/fixtures/. The
// outputs are committed; this tool exists so they can be rebuilt or resized.
//
// Fixtures:
//   aniso_gauss.libsvm      two overlapping classes + strong rotated
//                           nuisance directions (d = 8)
//   rotated_clusters.libsvm elongated clusters, major axis off the class
//                           direction (d = 4)
//   xor_margin.libsvm       XOR quadrant blobs with a margin band (d = 2)

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "fsvm/core.hpp"

using namespace fsvm;

namespace {

// Random rotation via Gram-Schmidt on a random Gaussian matrix.
Matrix random_rotation(Rng& rng, int d) {
    Matrix q(d, d);
    for (int c = 0; c < d; ++c) {
        Vector v(d);
        for (int i = 0; i < d; ++i) v[i] = rng.normal();
        for (int prev = 0; prev < c; ++prev) {
            double proj = 0.0;
            for (int i = 0; i < d; ++i) proj += v[i] * q(i, prev);
            for (int i = 0; i < d; ++i) v[i] -= proj * q(i, prev);
        }
        double norm = std::sqrt(dot(v, v));
        if (norm < 1e-12) { v[c % d] += 1.0; norm = std::sqrt(dot(v, v)); }
        for (int i = 0; i < d; ++i) q(i, c) = v[i] / norm;
    }
    return q;
}

void write_libsvm(const std::string& path, const Matrix& x, const std::vector<int>& y) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        std::fprintf(stderr, "cannot write %s\n", path.c_str());
        std::exit(1);
    }
    for (int i = 0; i < x.rows; ++i) {
        std::fprintf(f, "%+d", y[i]);
        for (int j = 0; j < x.cols; ++j) std::fprintf(f, " %d:%.17g", j + 1, x(i, j));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
    std::printf("wrote %s (%d x %d)\n", path.c_str(), x.rows, x.cols);
}

void make_aniso(const std::string& dir) {
    const int n = 240, d = 6;
    Rng rng(20240001);
    const Matrix rot = random_rotation(rng, d);
    Matrix x(n, d);
    std::vector<int> y(n);
    const double nuisance[2] = {8.0, 5.0};
    for (int i = 0; i < n; ++i) {
        y[i] = (i % 2 == 0) ? 1 : -1;
        Vector intrinsic(d, 0.0);
        intrinsic[0] = 1.0 * y[i] + 0.7 * rng.normal();
        for (int k = 0; k < 2; ++k) intrinsic[1 + k] = nuisance[k] * rng.normal();
        for (int k = 3; k < d; ++k) intrinsic[k] = 0.6 * rng.normal();
        const Vector mixed = matvec(rot, intrinsic);
        for (int j = 0; j < d; ++j) x(i, j) = mixed[j];
    }
    write_libsvm(dir + "/aniso_gauss.libsvm", x, y);
}

void make_rotated_clusters(const std::string& dir) {
    const int n = 240, d = 4;
    Rng rng(20240002);
    const Matrix rot = random_rotation(rng, d);
    Matrix x(n, d);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = (i % 2 == 0) ? 1 : -1;
        Vector intrinsic(d, 0.0);
        intrinsic[0] = 1.0 * y[i] + 0.65 * rng.normal();
        intrinsic[1] = 6.0 * rng.normal();
        intrinsic[2] = 0.8 * rng.normal();
        intrinsic[3] = 0.8 * rng.normal();
        const Vector mixed = matvec(rot, intrinsic);
        for (int j = 0; j < d; ++j) x(i, j) = mixed[j];
    }
    write_libsvm(dir + "/rotated_clusters.libsvm", x, y);
}

void make_xor(const std::string& dir) {
    // Four quadrant blobs with alternating labels and a margin band around
    // the axes. The 60/40 class prior gives linear models a stable majority
    // plateau; separating the blobs takes a kernel.
    const int n = 400;
    Rng rng(20240003);
    Matrix x(n, 2);
    std::vector<int> y(n);
    // Quadrant sequence: 120 points each in (+,+) and (-,-), 80 each in the
    // mixed-sign quadrants.
    int idx = 0;
    auto emit = [&](int qx, int qy, int count) {
        for (int c = 0; c < count; ++c) {
            y[idx] = qx * qy;  // XOR pattern over quadrant signs
            for (int j = 0; j < 2; ++j) {
                double v;
                do {
                    v = 1.0 + 0.25 * rng.normal();
                } while (v < 0.3);
                x(idx, j) = (j == 0 ? qx : qy) * v;
            }
            ++idx;
        }
    };
    emit(1, 1, 120);
    emit(-1, -1, 120);
    emit(1, -1, 80);
    emit(-1, 1, 80);
    write_libsvm(dir + "/xor_margin.libsvm", x, y);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data/fixtures";
    std::filesystem::create_directories(dir);
    make_aniso(dir);
    make_rotated_clusters(dir);
    make_xor(dir);
    return 0;
}
