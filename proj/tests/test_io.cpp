#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "geogic/error.hpp"
#include "geogic/io.hpp"

using namespace geogic;

namespace {

std::string error_of(const std::string& csv) {
  std::istringstream is(csv);
  try {
    (void)read_dataset_csv(is, "test.csv");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

Dataset simulated(int dim) {
  const auto s = dim == 1 ? sites_1d(40, 0.3) : sites_2d(36, 0.3);
  std::vector<RegressorSpec> specs{RegressorSpec::white_noise(1.0), RegressorSpec::exp_gp(2.0, 0.5)};
  const auto x = gen_regressors(specs, s, SeedKey{3});
  TruthSpec t;
  t.beta0 = Eigen::Vector3d(1.0, -0.5, 0.25);
  return simulate_dataset(t, x, s, SeedKey{3}).data;
}

}  // namespace

TEST_CASE("dataset round trip is lossless") {
  for (int dim : {1, 2}) {
    const Dataset d = simulated(dim);
    std::stringstream ss;
    write_dataset_csv(ss, d);
    const Dataset back = read_dataset_csv(ss);
    CHECK(back.sites.dim == dim);
    CHECK(back.n() == d.n());
    CHECK(back.p() == 2);
    CHECK((back.z - d.z).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((back.x - d.x).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((back.sites.coords - d.sites.coords).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(back.z == d.z);
  }
}

TEST_CASE("small valid file") {
  std::istringstream is("s1,z,x1,x2\n0.1,1.5,2,3\n0.2,1.7,2.5,-1\n0.3,1.1,0,0.5\n");
  const Dataset d = read_dataset_csv(is);
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(d.x(0, 0) == 1.0);
  CHECK(d.x(1, 2) == -1.0);
  CHECK(d.sites.coord(2) == 0.3);
  std::istringstream crlf("s1, z\r\n0.5, 2\r\n1.0, 3\r\n\r\n");
  CHECK(read_dataset_csv(crlf).n() == 2);
}

TEST_CASE("malformed files name the row") {
  CHECK(error_of("s1,z,x1\n0.1,1,2\n0.2,NaN,3\n").find("line 3") != std::string::npos);
  CHECK(error_of("s1,z,x1\n0.1,1,2\n0.2,NaN,3\n").find("'z'") != std::string::npos);
  CHECK(error_of("s1,z,x1\n0.1,1,2\n0.2,inf,3\n").find("non-finite") != std::string::npos);
  CHECK(error_of("s1,z,x1\n0.1,1,2\n0.2,1\n").find("line 3: expected 3 fields, found 2") != std::string::npos);
  CHECK(error_of("s1,z\n0.1,1\n0.2,2\n0.1,3\n").find("line 4: duplicate site, same as line 2") != std::string::npos);
  CHECK(error_of("s1,s2,z\n0,0,1\n0,1,1\n0,0,2\n").find("line 4") != std::string::npos);
  CHECK(error_of("s1,z,x1\n0.1,abc,2\n").find("cannot parse 'abc'") != std::string::npos);
  CHECK(error_of("s1,z,x2\n0.1,1,2\n").find("expected 'x1'") != std::string::npos);
  CHECK(error_of("z,s1\n1,2\n").find("line 1") != std::string::npos);
  CHECK(error_of("").find("empty") != std::string::npos);
  CHECK(error_of("s1,z\n").find("no data") != std::string::npos);
}

TEST_CASE("experiment config JSON round trip") {
  auto c = consistency_preset(SweepExample::exp_gp, {0.0, 0.5}, {100, 400}, TauRule::power(0.3), 12, 9);
  c.tau_rules.push_back(TauRule::constant(4.0));
  c.zeta = RegressorSpec::monomial(2);
  c.zeta_coef = 0.5;
  const Json j = to_json(c);
  const ExperimentConfig back = experiment_config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(config_digest(to_json(back)) == config_digest(j));

  ExperimentConfig ex;
  ex.regressors = {RegressorSpec::named(NamedFunction::f2)};
  ex.beta0 = Eigen::Vector2d(1, 1);
  ex.universe = UniverseKind::explicit_list;
  ex.explicit_models = {ModelAlpha{}, ModelAlpha({1})};
  ex.known_theta = true;
  ex.mle.box = ThetaBox::singleton(ex.theta0);
  CHECK(to_json(experiment_config_from_json(to_json(ex))) == to_json(ex));
}

TEST_CASE("config diagnostics name the field") {
  const auto err = [](const std::string& text) {
    try {
      (void)experiment_config_from_json(parse_json_text(text, "cfg.json"));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(err(R"({"replicates": "ten"})").find("'replicates'") != std::string::npos);
  CHECK(err(R"({"bogus": 1})").find("'bogus': unknown key") != std::string::npos);
  CHECK(err(R"({"regressors": [{"kind": "white_noise", "variance": -1}]})").find("regressors[0]") != std::string::npos);
  CHECK(err(R"({"ns": [100, 2.5]})").find("ns[1]") != std::string::npos);
  CHECK(err(R"({"mle": {"box": {"v2": [0, 1], "sigma2": [0, 1], "kappa": [1, 2]}}})").find("mle.box") != std::string::npos);
  CHECK(err(R"({"tau": ["bic", "hqc"]})").find("tau[1]") != std::string::npos);
  CHECK(err("{\n  \"ns\": [100,\n  ]\n}").find("line 3") != std::string::npos);
  CHECK(err(R"({"theta0": [0.5, 0.5]})").find("theta0") != std::string::npos);
}

TEST_CASE("real lists") {
  CHECK(parse_real_list("0.5, 1,2e-1", "x") == std::vector<double>{0.5, 1.0, 0.2});
  CHECK_THROWS_AS(parse_real_list("1,,2", "x"), ConfigError);
  CHECK_THROWS_AS(parse_real_list("1,nan", "x"), ConfigError);
}

TEST_CASE("experiment outputs") {
  auto c = consistency_preset(SweepExample::white_noise, {0.0}, {30, 50}, TauRule::bic(), 3, 5);
  c.mle.grid_resolution = 3;
  const std::vector<ExperimentResult> rs{run_experiment(c)};

  std::ostringstream freq;
  write_frequency_csv(freq, rs);
  std::istringstream lines(freq.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "function,n,delta,model,count");
  int rows = 0;
  int count = 0;
  while (std::getline(lines, line)) {
    ++rows;
    count += std::stoi(line.substr(line.rfind(',') + 1));
  }
  CHECK(rows == 8);
  CHECK(count == 6);
  CHECK(freq.str().find("whitenoise,30,0,\"{1,2}\",") != std::string::npos);

  std::ostringstream t1;
  write_table1_csv(t1, rs);
  CHECK(t1.str().rfind("function,n,model,frequency\n", 0) == 0);
  CHECK(t1.str().find("whitenoise,50,∅,") != std::string::npos);

  const std::string svg = frequency_svg(rs);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("{1,2}") != std::string::npos);
  CHECK(svg.find("n=50") != std::string::npos);

  const Json j = results_json(rs);
  const Json& e = j["experiments"][0];
  CHECK(e["config_digest"] == config_digest(e["config"]));
  CHECK(e["cells"].size() == 2);
  CHECK(e["true_model"] == "{1}");
}

TEST_CASE("hashing and manifest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  RunManifest m;
  m.seed = 42;
  m.outputs.push_back({"a.csv", 3, sha256_hex("abc")});
  const Json j = to_json(m);
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["outputs"][0]["bytes"] == 3);
  CHECK(utc_timestamp().size() == 20);
}
