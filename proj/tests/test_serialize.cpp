#include "doctest.h"

#include <cstdio>
#include <string>

#include "hlc/error.hpp"
#include "hlc/serialize.hpp"
#include "support.hpp"

using namespace hlc;

TEST_CASE("matrix round-trip is exact") {
  std::mt19937_64 rng(1);
  const ComplexMatrix m = hlc_test::random_matrix(rng, 3, 2);
  const Json j = Json::parse(matrix_to_json(m).dump());
  CHECK(max_abs_distance(matrix_from_json(j), m) == 0.0);

  Json bad = matrix_to_json(m);
  bad["rows"] = 4;
  CHECK_THROWS_AS(matrix_from_json(bad), DomainError);
  bad = matrix_to_json(m);
  bad["data"][0] = "x";
  CHECK_THROWS_AS(matrix_from_json(bad), DomainError);
  CHECK_THROWS_AS(matrix_from_json(Json::object()), DomainError);
}

TEST_CASE("measurement set and filters round-trip") {
  const auto ms = icosahedron_set();
  const auto back = measurement_set_from_json(Json::parse(measurement_set_to_json(ms).dump()));
  REQUIRE(back.size() == ms.size());
  CHECK(back.id() == ms.id());
  for (std::size_t x = 0; x < ms.size(); ++x)
    for (std::size_t a = 0; a < 2; ++a)
      CHECK(max_abs_distance(back[x].element(a).matrix(), ms[x].element(a).matrix()) < 1e-15);

  std::mt19937_64 rng(4);
  const FilterPair f(hlc_test::random_filter(rng, 3), hlc_test::random_filter(rng, 2));
  const auto g = filters_from_json(filters_to_json(f));
  CHECK(max_abs_distance(g.f_a(), f.f_a()) == 0.0);

  const auto rho = werner(WernerParams(0.3));
  CHECK(max_abs_distance(density_from_json(density_to_json(rho)).matrix(), rho.matrix()) == 0.0);
}

TEST_CASE("SDP certificate survives a JSON round-trip") {
  const auto ms = icosahedron_set();
  const auto cert = solve_protocol1(0.35, 0.66, 0.0, ms);
  const Json j = Json::parse(certificate_to_json(cert, ms).dump());
  CHECK(j["schema"] == kCertificateSchema);
  CHECK(j["verification"]["valid"] == true);

  const auto any = certificate_from_json(j);
  const auto& loaded = std::get<LoadedLhsCertificate>(any);
  CHECK(loaded.certificate.q_certified == cert.q_certified);
  const auto rep = verify_any(any);
  CHECK(rep.valid);
  CHECK(rep.certified);

  SUBCASE("tampered visibility") {
    Json t = j;
    t["q_star"] = cert.q_certified + 0.05;
    CHECK_FALSE(verify_any(certificate_from_json(t)).valid);
  }
  SUBCASE("tampered measurement set under the built-in id") {
    Json t = j;
    // A valid POVM, but not the built-in one.
    t["measurements"]["povms"][0] = t["measurements"]["povms"][1];
    const auto rep2 = verify_any(certificate_from_json(t));
    CHECK_FALSE(rep2.valid);
  }
  SUBCASE("wrong schema") {
    Json t = j;
    t["schema"] = "something-else/1";
    CHECK_THROWS_AS(certificate_from_json(t), DomainError);
  }
}

TEST_CASE("decomposition certificates round-trip") {
  for (const auto& c : {i3_certificate(0.36, 0.75), lemma1_certificate(0.35, 0.4, lemma1_max_alpha(0.35, 0.4, 0.42), 0.42), i1_certificate(0.08)}) {
    REQUIRE(c.valid);
    const Json j = Json::parse(certificate_to_json(c).dump());
    const auto d = std::get<DecompositionCertificate>(certificate_from_json(j));
    CHECK(d.technique == c.technique);
    CHECK(d.q == c.q);
    CHECK(max_abs_distance(d.s, c.s) == 0.0);
    CHECK(verify_decomposition(d).valid);
    Json t = j;
    t["q"] = c.q * 0.9;
    CHECK_FALSE(verify_any(certificate_from_json(t)).valid);
  }
}

TEST_CASE("sweep result round-trip") {
  SweepConfig cfg;
  cfg.grid = 3;
  cfg.max_interp_loss = 0.0;
  cfg.i1_points = 2;
  cfg.i3_points = 3;
  const auto r = sweep(cfg);
  const std::string text = sweep_to_json(r).dump();
  const auto back = sweep_from_json(Json::parse(text));
  CHECK(sweep_to_json(back).dump() == text);
  CHECK(back.config.hash() == cfg.hash());
  CHECK(emit_csv(back) == emit_csv(r));
  const auto ms = icosahedron_set();
  for (const auto& c : back.sdp_certificates) CHECK(verify_certificate(c, ms).valid);
  for (const auto& d : back.decompositions) CHECK(verify_decomposition(d).valid);
  CHECK_FALSE(Json::parse(text).contains("timings"));
  CHECK(sweep_to_json(r, true).contains("timings"));

  Json broken = Json::parse(text);
  broken["records"][0]["cert_index"] = 999;
  CHECK_THROWS_AS(sweep_from_json(broken), DomainError);
}

TEST_CASE("file helpers name the path on failure") {
  try {
    read_json_file("/nonexistent/dir/file.json");
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/file.json") != std::string::npos);
  }
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/out.txt", "x"), Error);

  const std::string path = "hlc_serialize_test.json";
  write_text_file(path, "{\"a\": [1, 2]}");
  CHECK(read_json_file(path)["a"][1] == 2);
  write_text_file(path, "{not json");
  CHECK_THROWS_AS(read_json_file(path), DomainError);
  std::remove(path.c_str());
}
