#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fsvm/dataset.hpp"

using namespace fsvm;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content, const char* name) {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("libsvm: basic sparse rows") {
    TempFile f("+1 1:0.5 3:2.0\n-1\n", "fsvm_t1.libsvm");
    Dataset ds = load_libsvm(f.path);
    REQUIRE(ds.n() == 2);
    REQUIRE(ds.d() == 3);
    REQUIRE(ds.y[0] == 1);
    REQUIRE(ds.X(0, 0) == 0.5);
    REQUIRE(ds.X(0, 1) == 0.0);
    REQUIRE(ds.X(0, 2) == 2.0);
    // Label-only line: all-zero row.
    REQUIRE(ds.y[1] == -1);
    for (int j = 0; j < 3; ++j) REQUIRE(ds.X(1, j) == 0.0);
}

TEST_CASE("libsvm: index 0 is rejected with a line number") {
    TempFile f("+1 1:1.0\n1 0:1.0\n", "fsvm_t2.libsvm");
    try {
        load_libsvm(f.path);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find(":2") != std::string::npos);
        REQUIRE(msg.find("index must be >= 1") != std::string::npos);
    }
}

TEST_CASE("libsvm: non-ascending indices and bad tokens are rejected") {
    TempFile f1("+1 2:1.0 2:2.0\n", "fsvm_t3.libsvm");
    REQUIRE_THROWS_AS(load_libsvm(f1.path), parse_error);
    TempFile f2("+1 3:1.0 2:2.0\n", "fsvm_t3b.libsvm");
    REQUIRE_THROWS_AS(load_libsvm(f2.path), parse_error);
    TempFile f3("abc 1:1.0\n", "fsvm_t3c.libsvm");
    REQUIRE_THROWS_AS(load_libsvm(f3.path), parse_error);
    TempFile f4("+1 1:x\n", "fsvm_t3d.libsvm");
    REQUIRE_THROWS_AS(load_libsvm(f4.path), parse_error);
    REQUIRE_THROWS_AS(load_libsvm("/nonexistent/file.libsvm"), parse_error);
}

TEST_CASE("libsvm: blank lines are skipped, width is the max index") {
    TempFile f("1 2:1.5\n\n-1 5:1.0\n", "fsvm_t4.libsvm");
    Dataset ds = load_libsvm(f.path);
    REQUIRE(ds.n() == 2);
    REQUIRE(ds.d() == 5);
    REQUIRE(ds.X(0, 1) == 1.5);
    REQUIRE(ds.X(1, 4) == 1.0);
}

TEST_CASE("csv loading with named label column") {
    TempFile f("a,label,b\n1.0,3,2.0\n-1.5,4,0.25\n", "fsvm_t5.csv");
    Dataset ds = load_csv(f.path);
    REQUIRE(ds.n() == 2);
    REQUIRE(ds.d() == 2);
    REQUIRE(ds.y == std::vector<long>{3, 4});
    REQUIRE(ds.X(1, 0) == -1.5);
    REQUIRE(ds.X(1, 1) == 0.25);
    REQUIRE(ds.feature_names == std::vector<std::string>{"a", "b"});

    TempFile g("x,target\n1,2\n", "fsvm_t6.csv");
    REQUIRE_THROWS_AS(load_csv(g.path), parse_error);
    Dataset ds2 = load_csv(g.path, "target");
    REQUIRE(ds2.y == std::vector<long>{2});
}

TEST_CASE("points csv accepts headers and space separation") {
    TempFile f("x,y\n1.0,2.0\n3.0,4.0\n", "fsvm_t7.csv");
    Matrix pts = load_points_csv(f.path);
    REQUIRE(pts.rows == 2);
    REQUIRE(pts.cols == 2);
    REQUIRE(pts(1, 1) == 4.0);

    TempFile g("1 2\n3 4\n", "fsvm_t8.csv");
    Matrix pts2 = load_points_csv(g.path);
    REQUIRE(pts2(0, 1) == 2.0);
}

TEST_CASE("standardize: mean zero, unit variance, constant-column floor") {
    Matrix train(2, 2);
    train(0, 0) = 0.0;
    train(1, 0) = 2.0;
    train(0, 1) = 7.0;
    train(1, 1) = 7.0;  // constant column
    Scaler s = standardize(train);
    // Column {0, 2} -> {-1, +1} (population variance).
    REQUIRE(train(0, 0) == Catch::Approx(-1.0));
    REQUIRE(train(1, 0) == Catch::Approx(1.0));
    // Constant column: mean removed, scale 1.
    REQUIRE(train(0, 1) == 0.0);
    REQUIRE(train(1, 1) == 0.0);
    REQUIRE(s.scale[1] == 1.0);
}

TEST_CASE("standardize: held-out data uses training statistics only") {
    Matrix train(4, 1), test(1, 1);
    train(0, 0) = 0.0;
    train(1, 0) = 0.0;
    train(2, 0) = 2.0;
    train(3, 0) = 2.0;
    test(0, 0) = 1000.0;  // extreme outlier must not shrink the scale
    Scaler s = standardize(train, {&test});
    REQUIRE(s.mean[0] == 1.0);
    REQUIRE(s.scale[0] == 1.0);
    REQUIRE(test(0, 0) == Catch::Approx(999.0));
}
