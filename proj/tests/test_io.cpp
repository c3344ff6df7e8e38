#include "doctest.h"

#include <filesystem>

#include "effcond/io.hpp"

using namespace effcond;

TEST_CASE("complex and tensor literals") {
  CHECK(io::parse_complex("2") == cplx(2.0, 0.0));
  CHECK(io::parse_complex("1.5+2j") == cplx(1.5, 2.0));
  CHECK(io::parse_complex("1e-3-4.5j") == cplx(1e-3, -4.5));
  CHECK(io::parse_complex("-2j") == cplx(0.0, -2.0));
  CHECK(io::parse_complex("j") == cplx(0.0, 1.0));
  CHECK(io::parse_complex("3-j") == cplx(3.0, -1.0));
  CHECK_THROWS_AS(io::parse_complex("abc"), ParseError);
  const Tensor2 t = io::parse_tensor("10,0,0.5+1j,1");
  CHECK(t(0, 0) == cplx(10.0, 0.0));
  CHECK(t(1, 0) == cplx(0.5, 1.0));
  CHECK_THROWS_AS(io::parse_tensor("1,2,3"), ParseError);
  CHECK((io::tensor_from_json(io::to_json(t)) - t).norm() == 0.0);
}

TEST_CASE("geometry parsing") {
  const GridGeometry a = io::parse_geometry(
      "{\"n\": 4, \"chi\": [[1,1,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}");
  CHECK(a.n == 4);
  const GridGeometry b = io::parse_geometry("1100\n0000\n0000\n0000\n");
  CHECK(b.chi == a.chi);
  CHECK_THROWS_AS(io::parse_geometry("{\"n\": 8, \"chi\": [[1,1,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"),
                  DimensionMismatch);
  CHECK_THROWS_AS(io::parse_geometry("1x00\n0000\n0000\n0000\n"), ParseError);
  const GridGeometry cb = io::parse_geometry(
      "{\"chi\": [[1,1,0,0],[1,1,0,0],[0,0,1,1],[0,0,1,1]], \"mirror\": \"auto\"}");
  CHECK(cb.mirror == 1);
  CHECK(io::geometry_hash(a) == io::geometry_hash(b));
  CHECK(io::geometry_hash(a) != io::geometry_hash(cb));
}

TEST_CASE("rep serialization is bit exact") {
  const CanonicalRep rep = extract_rep(build_eigenbasis(checkerboard(8)));
  const std::string text = io::dump(io::to_json(rep));
  const CanonicalRep back = io::rep_from_json(io::json::parse(text));
  CHECK(io::dump(io::to_json(back)) == text);
  CHECK((back.rho - rep.rho).norm() == 0.0);
  CHECK((back.H1 - rep.H1).norm() == 0.0);
  CHECK(back.perm1 == rep.perm1);
}

TEST_CASE("seventeen significant digits") {
  const std::string s = io::dump(io::json{{"x", 0.1}}, 0);
  CHECK(s == "{\"x\":0.10000000000000001}\n");
}

TEST_CASE("laminate program parsing") {
  const auto j = io::json::parse(R"({"sigma0": [[2, 0], [0, "1+0.5j"]], "sigma_ref": 5,
      "n0": [1, 0], "rotation0_deg": 10, "steps": [{"rotation_deg": 30, "fraction": 0.4}]})");
  const LaminateProgram p = io::laminate_from_json(j);
  CHECK(p.sigma0(1, 1) == cplx(1.0, 0.5));
  CHECK(*p.sigma_ref == 5.0);
  CHECK(p.steps.size() == 1);
  CHECK_THROWS_AS(io::laminate_from_json(io::json::parse(R"({"n0": [1, 0]})")), ParseError);
}

TEST_CASE("sample CSV") {
  const auto s = io::parse_samples_csv("# comment\nre_lambda,im_lambda,re,im\n1,0,2,0\n3,1,4,-1\n");
  REQUIRE(s.size() == 2);
  CHECK(s[1].lambda == cplx(3.0, 1.0));
  CHECK_THROWS_AS(io::parse_samples_csv("1,2,3\n"), ParseError);
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "effcond_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  io::write_file_atomic(path, "abc");
  CHECK(io::read_file(path) == "abc");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}
