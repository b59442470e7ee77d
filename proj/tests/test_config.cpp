#include <doctest.h>

#include "armcal/config.hpp"
#include "armcal/errors.hpp"
#include "support.hpp"

using namespace armcal;

namespace {

// Runs `fn`, which must throw ParseError, and returns it.
template <typename Fn>
ParseError parse_error(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no ParseError thrown");
  return ParseError("", 0, "");
}

RunConfig config_of(const std::string& text) {
  return run_config_from(IniDocument::parse(text, "run.ini"));
}

}  // namespace

TEST_CASE("ini syntax") {
  const IniDocument doc = IniDocument::parse(
      "# comment\n"
      "top = 1\n"
      "\n"
      "[alpha]\n"
      "  key = some value   ; trailing comment\n"
      "other=2\n"
      "[ beta ]\n"
      "k = x # also a comment\n",
      "a.ini");
  CHECK(doc.origin() == "a.ini");
  REQUIRE(doc.find("", "top"));
  CHECK(doc.find("", "top")->value == "1");
  CHECK(doc.find("", "top")->line == 2);
  CHECK(doc.find("alpha", "key")->value == "some value");
  CHECK(doc.find("alpha", "key")->line == 5);
  CHECK(doc.find("alpha", "other")->value == "2");
  CHECK(doc.find("beta", "k")->value == "x");
  CHECK(doc.find("alpha", "missing") == nullptr);
  CHECK(doc.find("gamma", "k") == nullptr);

  SUBCASE("duplicate key") {
    const ParseError e = parse_error([] { IniDocument::parse("[s]\na = 1\n\na = 2\n", "d.ini"); });
    CHECK(e.path() == "d.ini");
    CHECK(e.line() == 4);
  }
  SUBCASE("malformed header") {
    CHECK(parse_error([] { IniDocument::parse("a = 1\n[open\n", "h.ini"); }).line() == 2);
  }
  SUBCASE("line without equals") {
    const ParseError e = parse_error([] { IniDocument::parse("[s]\njust words\n", "w.ini"); });
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("w.ini:2:") == 0);
  }
  SUBCASE("missing key") {
    CHECK(parse_error([] { IniDocument::parse("= 3\n", "k.ini"); }).line() == 1);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(IniDocument::load("/nonexistent/dir/x.ini"), ParseError);
  }
}

TEST_CASE("run config") {
  SUBCASE("empty file gives the built-in defaults") {
    const RunConfig c = config_of("");
    const RunConfig d;
    CHECK(c.scenario.samples == d.scenario.samples);
    CHECK(c.methods.pf.n_particles == d.methods.pf.n_particles);
    CHECK(c.ensemble.shrinkage == d.ensemble.shrinkage);
    CHECK_FALSE(c.robot_file);
  }
  SUBCASE("every section overrides its settings") {
    const RunConfig c = config_of(
        "[encoder]\nanchor = 100 -200 5\nlength_offset = 2\n"
        "[simulation]\nsamples = 50\nnoise_sigma = 0.05\nseed = 9\ndisturbance = 0.5\n"
        "joint_lower = -1\njoint_upper = 1 1 1 1 1 0.5\n"
        "[split]\ntrain_fraction = 0.75\nseed = 4\n"
        "[ekf]\np0_length = 4\np0_angle = 1e-4\nr = 0.02\npasses = 2\n"
        "[lm]\nlambda = 0.1\niterations = 7\n"
        "[pf]\nparticles = 100\nprior_sigma_length = 0.5\nseed = 3\n"
        "[epf]\nparticles = 10\nekf_passes = 2\n"
        "[ga]\npopulation = 40\ngenerations = 10\nbound_length = 3\nbound_angle = 0.02\nseed = 5\n"
        "[svm]\nhidden_width = 8\nepochs = 100\nseed = 6\n"
        "[ensemble]\norder = lm svm\nshrinkage = 0.7\n"
        "[output]\ndirectory = out\n");
    CHECK(c.encoder.anchor == Eigen::Vector3d(100, -200, 5));
    CHECK(c.encoder.length_offset == 2.0);
    CHECK(c.scenario.samples == 50);
    CHECK(c.scenario.noise_sigma == 0.05);
    CHECK(c.scenario.seed == 9);
    CHECK(c.scenario.simulation.disturbance_amplitude == 0.5);
    CHECK(c.scenario.simulation.joint_lower == Vector6d::Constant(-1.0));
    CHECK(c.scenario.simulation.joint_upper[5] == 0.5);
    CHECK(c.scenario.train_fraction == 0.75);
    CHECK(c.split_seed == 4);
    CHECK(c.methods.ekf.p0(0, 0) == 4.0);
    CHECK(c.methods.ekf.p0(12, 12) == 1e-4);
    CHECK(c.methods.ekf.passes == 2);
    CHECK(c.methods.lm.lambda == 0.1);
    CHECK(c.methods.lm.iterations == 7);
    CHECK(c.methods.pf.n_particles == 100);
    CHECK(c.methods.pf.prior_sigma[0] == 0.5);
    CHECK(c.methods.pf.seed == 3);
    CHECK(c.methods.epf.pf.n_particles == 10);
    CHECK(c.methods.epf.ekf.passes == 2);
    CHECK(c.methods.epf.ekf.r == 0.02);
    CHECK(c.methods.ga.population == 40);
    CHECK(c.methods.ga.upper[0] == 3.0);
    CHECK(c.methods.ga.lower[20] == -0.02);
    CHECK(c.methods.lmga.ga.population == 40);
    CHECK(c.methods.lmga.lm.iterations == 7);
    CHECK(c.methods.sga.svm.hidden_width == 8);
    CHECK(c.methods.sga.ga.seed == 5);
    CHECK(c.ensemble.order == std::vector<Method>{Method::kLM, Method::kSVM});
    CHECK(c.ensemble.shrinkage == 0.7);
    CHECK(c.output_directory == std::filesystem::path("out"));
  }
  SUBCASE("errors point at the line") {
    CHECK(parse_error([] { config_of("[lm]\n\nlambda = fast\n"); }).line() == 3);
    CHECK(parse_error([] { config_of("[lm]\nlamda = 1\n"); }).line() == 2);
    CHECK(parse_error([] { config_of("[nope]\nx = 1\n"); }).line() == 2);
    CHECK(parse_error([] { config_of("stray = 1\n"); }).line() == 1);
    CHECK(parse_error([] { config_of("[encoder]\nanchor = 1 2\n"); }).line() == 2);
    CHECK(parse_error([] { config_of("[simulation]\nsamples = -3\n"); }).line() == 2);
    CHECK(parse_error([] { config_of("[ensemble]\norder = lm kalman\n"); }).line() == 2);
    const ParseError range = parse_error([] { config_of("[ensemble]\nshrinkage = 2\n"); });
    CHECK(range.line() == 2);
    CHECK(std::string(range.what()).find("[ensemble]") != std::string::npos);
    CHECK(parse_error([] { config_of("[split]\ntrain_fraction = 1.5\n"); }).line() == 2);
  }
}

TEST_CASE("robot files") {
  TempDir dir;
  DHChain chain = default_nominal_chain();

  SUBCASE("round trip reproduces every value") {
    write_robot_file(dir / "arm.dh", chain);
    const DHChain back = read_robot_file(dir / "arm.dh");
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(back[i].a == chain[i].a);
      CHECK(back[i].d == chain[i].d);
      CHECK(back[i].theta_offset == chain[i].theta_offset);
      CHECK(back[i].alpha == chain[i].alpha);
    }
  }
  SUBCASE("missing link") {
    write_file(dir / "short.dh", "link1 = 0 1 0 0\nlink2 = 0 1 0 0\n");
    CHECK_THROWS_WITH_AS(read_robot_file(dir / "short.dh"), doctest::Contains("link3"), ParseError);
  }
  SUBCASE("wrong field count") {
    write_robot_file(dir / "arm.dh", chain);
    std::string text = read_file(dir / "arm.dh");
    text.replace(text.find("link2 ="), 7, "link2 = 1");
    write_file(dir / "bad.dh", text);
    CHECK(parse_error([&] { read_robot_file(dir / "bad.dh"); }).line() == 3);
  }
  SUBCASE("config resolves the robot file next to itself") {
    std::vector<DHLink> links;
    for (std::size_t i = 0; i < 6; ++i) links.push_back(chain[i]);
    links[0].d += 10.0;
    write_robot_file(dir / "custom.dh", DHChain::from_links(links));
    write_file(dir / "run.ini", "[robot]\nfile = custom.dh\n");
    const RunConfig c = load_run_config(dir / "run.ini");
    REQUIRE(c.robot_file);
    CHECK(*c.robot_file == dir / "custom.dh");
    CHECK(c.nominal[0].d == chain[0].d + 10.0);
  }
}

TEST_CASE("shipped default config matches the built-in defaults") {
  const std::filesystem::path dir = std::filesystem::path(ARMCAL_SOURCE_DIR) / "config";
  const RunConfig c = load_run_config(dir / "default.ini");
  const RunConfig d;
  CHECK(*c.robot_file == dir / "robot.dh");
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(c.nominal[i].a == d.nominal[i].a);
    CHECK(c.nominal[i].d == d.nominal[i].d);
    CHECK(c.nominal[i].theta_offset == d.nominal[i].theta_offset);
    CHECK(c.nominal[i].alpha == d.nominal[i].alpha);
  }
  CHECK(c.encoder.anchor == d.encoder.anchor);
  CHECK(c.encoder.length_offset == d.encoder.length_offset);

  const ScenarioOptions &s = c.scenario, &t = d.scenario;
  CHECK(s.samples == t.samples);
  CHECK(s.noise_sigma == t.noise_sigma);
  CHECK(s.seed == t.seed);
  CHECK(s.length_bound == t.length_bound);
  CHECK(s.angle_bound == t.angle_bound);
  CHECK(s.target_rmse == t.target_rmse);
  CHECK(s.train_fraction == t.train_fraction);
  CHECK(s.simulation.disturbance_amplitude == t.simulation.disturbance_amplitude);
  CHECK(s.simulation.joint_lower == t.simulation.joint_lower);
  CHECK(s.simulation.joint_upper == t.simulation.joint_upper);
  CHECK(c.split_seed == d.split_seed);

  const MethodSettings &m = c.methods, &n = d.methods;
  CHECK(m.ekf.p0 == n.ekf.p0);
  CHECK(m.ekf.q == n.ekf.q);
  CHECK(m.ekf.r == n.ekf.r);
  CHECK(m.ekf.passes == n.ekf.passes);
  CHECK(m.lm.lambda == n.lm.lambda);
  CHECK(m.lm.iterations == n.lm.iterations);
  CHECK(m.lm.step_tolerance == n.lm.step_tolerance);
  for (const auto& [a, b] : {std::pair{&m.pf, &n.pf}, std::pair{&m.epf.pf, &n.epf.pf}}) {
    CHECK(a->n_particles == b->n_particles);
    CHECK(a->iterations == b->iterations);
    CHECK(a->prior_mean == b->prior_mean);
    CHECK(a->prior_sigma == b->prior_sigma);
    CHECK(a->diffusion_sigma == b->diffusion_sigma);
    CHECK(a->diffusion_decay == b->diffusion_decay);
    CHECK(a->r == b->r);
    CHECK(a->resample_threshold == b->resample_threshold);
    CHECK(a->seed == b->seed);
  }
  CHECK(m.epf.ekf.p0 == n.epf.ekf.p0);
  CHECK(m.epf.ekf.passes == n.epf.ekf.passes);
  CHECK(m.ga.population == n.ga.population);
  CHECK(m.ga.generations == n.ga.generations);
  CHECK(m.ga.crossover_rate == n.ga.crossover_rate);
  CHECK(m.ga.mutation_rate == n.ga.mutation_rate);
  CHECK(m.ga.mutation_sigma == n.ga.mutation_sigma);
  CHECK(m.ga.mutation_decay == n.ga.mutation_decay);
  CHECK(m.ga.lower == n.ga.lower);
  CHECK(m.ga.upper == n.ga.upper);
  CHECK(m.ga.elitism == n.ga.elitism);
  CHECK(m.ga.seed == n.ga.seed);
  CHECK(m.svm.hidden_width == n.svm.hidden_width);
  CHECK(m.svm.reference_count == n.svm.reference_count);
  CHECK(m.svm.lambda1 == n.svm.lambda1);
  CHECK(m.svm.learning_rate == n.svm.learning_rate);
  CHECK(m.svm.momentum == n.svm.momentum);
  CHECK(m.svm.epochs == n.svm.epochs);
  CHECK(m.svm.init_scale == n.svm.init_scale);
  CHECK(m.svm.output_init_scale == n.svm.output_init_scale);
  CHECK(m.svm.validation_fraction == n.svm.validation_fraction);
  CHECK(m.svm.seed == n.svm.seed);
  CHECK(c.ensemble.order == d.ensemble.order);
  CHECK(c.ensemble.shrinkage == d.ensemble.shrinkage);

  CHECK(load_run_config(dir / "disturbed.ini").scenario.simulation.disturbance_amplitude == 1.0);
}
