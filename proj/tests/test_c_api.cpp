#include <cmath>
#include <string>

#include "doctest.h"

#include "circle_ifs.h"

namespace {

const char* kConfig = R"({"schema": 1,
  "generators": [{"kind": "rotation", "alpha": 0.6180339887498949}, {"kind": "sine", "a": 0.0, "b": -0.5}],
  "model": {"kind": "bernoulli", "weights": [0.5, 0.5]}, "seed": 1})";

}  // namespace

TEST_CASE("version") { CHECK(std::string(cifs_version()).size() > 0); }

TEST_CASE("map handles") {
  cifs_map* m = nullptr;
  REQUIRE(cifs_map_from_json(R"({"kind":"sine","a":0,"b":-0.5})", &m) == CIFS_OK);
  double y = 0, d = 0, x = 0, rho = 1;
  CHECK(cifs_map_eval(m, 0.25, &y) == CIFS_OK);
  CHECK(y == doctest::Approx(0.25 - 0.5 / (2 * M_PI)));
  CHECK(cifs_map_deriv(m, 0.5, &d) == CIFS_OK);
  CHECK(d == doctest::Approx(1.5));
  CHECK(cifs_map_inverse_eval(m, y, &x) == CIFS_OK);
  CHECK(x == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(cifs_map_rotation_number(m, 10000, &rho) == CIFS_OK);
  CHECK(std::abs(rho) < 1e-12);
  cifs_map_free(m);
}

TEST_CASE("errors are reported") {
  cifs_map* m = nullptr;
  CHECK(cifs_map_from_json(R"({"kind":"sine","a":0,"b":2})", &m) != CIFS_OK);
  CHECK(m == nullptr);
  CHECK(std::string(cifs_last_error()).find("b") != std::string::npos);
  CHECK(cifs_map_from_json("not json", &m) != CIFS_OK);
  CHECK(cifs_map_eval(nullptr, 0.1, nullptr) == CIFS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("ifs branch apply") {
  cifs_map* r = nullptr;
  cifs_map* g = nullptr;
  REQUIRE(cifs_map_from_json(R"({"kind":"rotation","alpha":0.25})", &r) == CIFS_OK);
  REQUIRE(cifs_map_from_json(R"({"kind":"sine","a":0,"b":-0.5})", &g) == CIFS_OK);
  const cifs_map* maps[] = {r, g};
  cifs_ifs* ifs = nullptr;
  REQUIRE(cifs_ifs_create(maps, 2, &ifs) == CIFS_OK);
  const int w[] = {2, 1};
  double out = 0, gy = 0, ry = 0;
  CHECK(cifs_ifs_branch_apply(ifs, w, 2, 0.1, &out) == CIFS_OK);
  cifs_map_eval(g, 0.1, &gy);
  cifs_map_eval(r, gy, &ry);
  CHECK(out == ry);
  const int bad[] = {3};
  CHECK(cifs_ifs_branch_apply(ifs, bad, 1, 0.1, &out) != CIFS_OK);
  cifs_ifs_free(ifs);
  cifs_map_free(r);
  cifs_map_free(g);
}

TEST_CASE("commands through the C interface") {
  cifs_output* out = nullptr;
  CHECK(cifs_run_command("certify", kConfig, "{}", &out) == 0);
  const std::string cert = cifs_output_text(out);
  cifs_output_free(out);
  CHECK(cert.find("\"forward\"") != std::string::npos);

  cifs_output* chk = nullptr;
  CHECK(cifs_certificate_check(cert.c_str(), &chk) == 0);
  cifs_output_free(chk);

  std::string bad = cert;
  const auto pos = bad.find("\"lambda\": ");
  REQUIRE(pos != std::string::npos);
  const auto end = bad.find_first_of(",\n", pos);
  bad.replace(pos, end - pos, "\"lambda\": 1.01");
  CHECK(cifs_certificate_check(bad.c_str(), nullptr) == 2);
  CHECK(cifs_certificate_check("{", nullptr) == 1);

  cifs_set_threads(2);
  CHECK(cifs_get_threads() == 2);
  cifs_set_threads(0);
}
