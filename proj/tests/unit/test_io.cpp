#include "robsub/errors.hpp"
#include "robsub/io.hpp"
#include "robsub/rng.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace robsub;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("robsub_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& contents = {}) const {
    const auto p = (path / name).string();
    if (!contents.empty()) std::ofstream(p) << contents;
    return p;
  }
};

}  // namespace

TEST_CASE("Matrix Market round trips") {
  TempDir tmp;
  Rng rng(1);
  const DenseMatrix d = gaussian_matrix(7, 4, 1.0, rng);
  write_matrix_market(tmp.file("d.mtx"), Matrix(d));
  const Matrix back = read_matrix_market(tmp.file("d.mtx"));
  CHECK_FALSE(back.is_sparse());
  CHECK((back.to_dense() - d).norm() == 0.0);

  DenseMatrix sp = d;
  sp(0, 0) = sp(3, 2) = sp(6, 1) = 0.0;
  const SparseMatrix s = sp.sparseView();
  write_matrix_market(tmp.file("s.mtx"), Matrix(s));
  const Matrix sback = read_matrix(tmp.file("s.mtx"));
  CHECK(sback.is_sparse());
  CHECK((sback.to_dense() - sp).norm() == 0.0);
}

TEST_CASE("Matrix Market variants") {
  TempDir tmp;
  const auto sym = tmp.file("sym.mtx",
                            "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 3\n1 1 2.0\n2 1 -1.5\n3 3 4\n");
  const DenseMatrix s = read_matrix_market(sym).to_dense();
  CHECK(s(1, 0) == -1.5);
  CHECK(s(0, 1) == -1.5);
  CHECK(s(2, 2) == 4.0);
  const auto skew = tmp.file("skew.mtx", "%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3\n");
  const DenseMatrix k = read_matrix_market(skew).to_dense();
  CHECK(k(1, 0) == 3.0);
  CHECK(k(0, 1) == -3.0);
  const auto pat = tmp.file("pat.mtx", "%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 3\n2 1\n");
  const DenseMatrix p = read_matrix_market(pat).to_dense();
  CHECK(p(0, 2) == 1.0);
  CHECK(p(1, 0) == 1.0);
  CHECK(p.sum() == 2.0);
  const auto arr = tmp.file("arr.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  const DenseMatrix ar = read_matrix_market(arr).to_dense();
  CHECK(ar(1, 0) == 2.0);
  CHECK(ar(0, 1) == 3.0);
}

TEST_CASE("Matrix Market errors") {
  TempDir tmp;
  CHECK_THROWS_AS(read_matrix_market(tmp.file("missing.mtx")), IoError);
  CHECK_THROWS_AS(read_matrix_market(tmp.file("nobanner.mtx", "3 3 1\n1 1 1\n")), IoError);
  CHECK_THROWS_AS(read_matrix_market(tmp.file("cx.mtx", "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n")),
                  IoError);
  CHECK_THROWS_AS(read_matrix_market(tmp.file("oob.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n")),
                  IoError);
  CHECK_THROWS_AS(read_matrix_market(tmp.file("short.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n")),
                  IoError);
  CHECK_THROWS_AS(read_matrix_market(tmp.file("nan.mtx", "%%MatrixMarket matrix array real general\n1 1\nnan\n")), IoError);
}

TEST_CASE("CSV matrices and vectors") {
  TempDir tmp;
  Rng rng(2);
  const DenseMatrix d = gaussian_matrix(5, 3, 1.0, rng);
  write_csv_matrix(tmp.file("d.csv"), d);
  CHECK((read_matrix(tmp.file("d.csv")).to_dense() - d).norm() == 0.0);
  CHECK_THROWS_AS(read_csv_matrix(tmp.file("ragged.csv", "1,2\n3\n")), IoError);
  CHECK_THROWS_AS(read_csv_matrix(tmp.file("bad.csv", "1,x\n")), IoError);
  CHECK_THROWS_AS(read_csv_matrix(tmp.file("empty.csv", "\n")), IoError);
  const Vector v = read_vector_csv(tmp.file("v.csv", "1\n2.5\n-3\n"));
  CHECK(v.size() == 3);
  CHECK(v[1] == 2.5);
  CHECK_THROWS_AS(read_vector_csv(tmp.file("wide.csv", "1,2\n3,4\n")), IoError);
  const WeightVector w = read_weights_csv(tmp.file("w.csv", "1\n4\n"));
  CHECK(w[1] == 4.0);
  CHECK_THROWS_AS(read_weights_csv(tmp.file("w0.csv", "0.5\n")), InputError);
}

TEST_CASE("edge lists") {
  TempDir tmp;
  const Adjacency adj = read_edge_list(tmp.file("k3.txt", "# triangle\n0 1\n\n1 2\n2 0\n"));
  CHECK(adj.rows() == 3);
  CHECK(adj.sum() == 6);
  CHECK(adj(2, 0) == 1);
  CHECK_THROWS_AS(read_edge_list(tmp.file("bad.txt", "0 x\n")), IoError);
  CHECK_THROWS_AS(read_edge_list(tmp.file("none.txt")), IoError);
}
