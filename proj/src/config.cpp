#include "armcal/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "armcal/errors.hpp"

namespace armcal {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Typed access to one section; remembers which keys were read so leftovers
// can be reported as unknown.
class SectionReader {
 public:
  SectionReader(const IniDocument& doc, std::string section)
      : doc_(doc), section_(std::move(section)) {}

  ~SectionReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    auto it = doc_.sections().find(section_);
    if (it == doc_.sections().end()) return;
    for (const auto& [key, entry] : it->second)
      if (!used_.count(key))
        fail(entry.line, "unknown key '" + key + "' in [" + section_ + "]");
  }

  void real(const std::string& key, double& out) {
    if (const auto* e = get(key)) {
      if (!parse_number(e->value, out))
        fail(e->line, key + ": expected a number, got '" + e->value + "'");
    }
  }

  template <typename T>
  void integer(const std::string& key, T& out) {
    if (const auto* e = get(key)) {
      if (!parse_number(e->value, out))
        fail(e->line, key + ": expected a non-negative integer, got '" + e->value + "'");
    }
  }

  /// `count` numbers, or one number repeated `count` times when `broadcast`.
  bool reals(const std::string& key, std::vector<double>& out, std::size_t count, bool broadcast) {
    const auto* e = get(key);
    if (!e) return false;
    std::vector<double> values;
    for (const auto& w : split_words(e->value)) {
      double v = 0.0;
      if (!parse_number(w, v)) fail(e->line, key + ": expected a number, got '" + w + "'");
      values.push_back(v);
    }
    if (broadcast && values.size() == 1) values.assign(count, values.front());
    if (values.size() != count)
      fail(e->line, key + ": expected " + std::to_string(count) + " numbers, got " +
                        std::to_string(values.size()));
    out = std::move(values);
    return true;
  }

  const IniDocument::Entry* get(const std::string& key) {
    used_.insert(key);
    return doc_.find(section_, key);
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw ParseError(doc_.origin().string(), line, what);
  }

 private:
  const IniDocument& doc_;
  std::string section_;
  std::set<std::string> used_;
};

Vector6d to_vector6(const std::vector<double>& v) {
  Vector6d out;
  for (int i = 0; i < 6; ++i) out[i] = v[static_cast<std::size_t>(i)];
  return out;
}

// Reads `<prefix>_length` / `<prefix>_angle` into a grouped 24-vector.
void grouped(SectionReader& r, const std::string& prefix, Vector24d& out) {
  double length = out[KinematicErrorVector::kA];
  double angle = out[KinematicErrorVector::kTheta];
  r.real(prefix + "_length", length);
  r.real(prefix + "_angle", angle);
  out = PFConfig::grouped(length, angle);
}

void read_particle_filter(SectionReader& r, PFConfig& pf) {
  r.integer("particles", pf.n_particles);
  r.integer("iterations", pf.iterations);
  grouped(r, "prior_sigma", pf.prior_sigma);
  grouped(r, "diffusion", pf.diffusion_sigma);
  r.real("diffusion_decay", pf.diffusion_decay);
  r.real("r", pf.r);
  r.real("resample_threshold", pf.resample_threshold);
  r.integer("seed", pf.seed);
}

template <typename Fn>
void guarded(const IniDocument& doc, const std::string& section, Fn&& validate) {
  try {
    validate();
  } catch (const std::invalid_argument& e) {
    std::size_t line = 0;
    auto it = doc.sections().find(section);
    if (it != doc.sections().end() && !it->second.empty()) {
      line = it->second.begin()->second.line;
      for (const auto& [key, entry] : it->second) line = std::min(line, entry.line);
    }
    throw ParseError(doc.origin().string(), line, "[" + section + "] " + e.what());
  }
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text, const std::filesystem::path& origin) {
  IniDocument doc;
  doc.origin_ = origin;
  std::istringstream in(text);
  std::string section;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const auto comment = raw.find_first_of("#;");
    const std::string s = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        throw ParseError(origin.string(), line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      doc.sections_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin.string(), line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError(origin.string(), line, "missing key before '='");
    auto& entries = doc.sections_[section];
    if (entries.count(key))
      throw ParseError(origin.string(), line,
                       "duplicate key '" + key + "' (first set on line " +
                           std::to_string(entries[key].line) + ")");
    entries[key] = Entry{value, line};
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

const IniDocument::Entry* IniDocument::find(const std::string& section,
                                            const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto e = s->second.find(key);
  return e == s->second.end() ? nullptr : &e->second;
}

DHChain read_robot_file(const std::filesystem::path& path) {
  const IniDocument doc = IniDocument::load(path);
  for (const auto& [name, entries] : doc.sections())
    if (!name.empty() && !entries.empty())
      throw ParseError(path.string(), entries.begin()->second.line,
                       "robot file takes no sections, found [" + name + "]");
  std::vector<DHLink> links;
  {
    SectionReader r(doc, "");
    for (std::size_t i = 1; i <= kJointCount; ++i) {
      const std::string key = "link" + std::to_string(i);
      std::vector<double> v;
      if (!r.reals(key, v, 4, false)) r.fail(0, "missing " + key);
      links.push_back(DHLink{v[0], v[1], v[2], v[3]});
    }
  }
  try {
    return DHChain::from_links(links);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

void write_robot_file(const std::filesystem::path& path, const DHChain& chain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "# linkN = a d theta_offset alpha   (mm, mm, rad, rad)\n";
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const DHLink& l = chain[i];
    out << "link" << i + 1;
    const char* sep = " =";
    for (double v : {l.a, l.d, l.theta_offset, l.alpha}) {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << sep << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
      sep = "";
    }
    out << '\n';
  }
  if (!out) throw Error("cannot write " + path.string());
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from(IniDocument::load(path));
}

RunConfig run_config_from(const IniDocument& doc) {
  static const std::set<std::string> known = {"",    "robot", "encoder", "simulation", "split",
                                               "ekf", "lm",    "pf",      "epf",        "ga",
                                               "svm", "ensemble", "output"};
  for (const auto& [name, entries] : doc.sections()) {
    if (!known.count(name)) {
      const std::size_t line = entries.empty() ? 0 : entries.begin()->second.line;
      throw ParseError(doc.origin().string(), line, "unknown section [" + name + "]");
    }
  }

  RunConfig cfg;
  const std::filesystem::path base = doc.origin().parent_path();
  { SectionReader top(doc, ""); }

  {
    SectionReader r(doc, "robot");
    if (const auto* e = r.get("file")) {
      std::filesystem::path p = e->value;
      if (p.is_relative()) p = base / p;
      cfg.robot_file = p;
      cfg.nominal = read_robot_file(p);
    }
  }
  {
    SectionReader r(doc, "encoder");
    std::vector<double> anchor;
    if (r.reals("anchor", anchor, 3, false))
      cfg.encoder.anchor = Eigen::Vector3d(anchor[0], anchor[1], anchor[2]);
    r.real("length_offset", cfg.encoder.length_offset);
  }
  guarded(doc, "encoder", [&] { cfg.encoder.validate(); });
  {
    SectionReader r(doc, "simulation");
    ScenarioOptions& s = cfg.scenario;
    r.integer("samples", s.samples);
    r.real("noise_sigma", s.noise_sigma);
    r.integer("seed", s.seed);
    r.real("length_bound", s.length_bound);
    r.real("angle_bound", s.angle_bound);
    r.real("target_rmse", s.target_rmse);
    r.real("disturbance", s.simulation.disturbance_amplitude);
    std::vector<double> v;
    if (r.reals("joint_lower", v, kJointCount, true)) s.simulation.joint_lower = to_vector6(v);
    if (r.reals("joint_upper", v, kJointCount, true)) s.simulation.joint_upper = to_vector6(v);
  }
  guarded(doc, "simulation", [&] { cfg.scenario.validate(); });
  {
    SectionReader r(doc, "split");
    r.real("train_fraction", cfg.scenario.train_fraction);
    r.integer("seed", cfg.split_seed);
  }
  guarded(doc, "split", [&] { cfg.scenario.validate(); });

  MethodSettings& m = cfg.methods;
  {
    SectionReader r(doc, "ekf");
    double p0_length = m.ekf.p0(KinematicErrorVector::kA, KinematicErrorVector::kA);
    double p0_angle = m.ekf.p0(KinematicErrorVector::kTheta, KinematicErrorVector::kTheta);
    double q_length = m.ekf.q(KinematicErrorVector::kA, KinematicErrorVector::kA);
    double q_angle = m.ekf.q(KinematicErrorVector::kTheta, KinematicErrorVector::kTheta);
    r.real("p0_length", p0_length);
    r.real("p0_angle", p0_angle);
    r.real("q_length", q_length);
    r.real("q_angle", q_angle);
    r.real("r", m.ekf.r);
    r.integer("passes", m.ekf.passes);
    m.ekf = EKFConfig::diagonal(p0_length, p0_angle, q_length, q_angle, m.ekf.r, m.ekf.passes);
  }
  guarded(doc, "ekf", [&] { m.ekf.validate(); });
  {
    SectionReader r(doc, "lm");
    r.real("lambda", m.lm.lambda);
    r.integer("iterations", m.lm.iterations);
    r.real("step_tolerance", m.lm.step_tolerance);
  }
  guarded(doc, "lm", [&] { m.lm.validate(); });
  {
    SectionReader r(doc, "pf");
    read_particle_filter(r, m.pf);
  }
  guarded(doc, "pf", [&] { m.pf.validate(); });
  {
    SectionReader r(doc, "epf");
    read_particle_filter(r, m.epf.pf);
    std::size_t passes = m.epf.ekf.passes;
    r.integer("ekf_passes", passes);
    m.epf.ekf = m.ekf;
    m.epf.ekf.passes = passes;
  }
  guarded(doc, "epf", [&] { m.epf.validate(); });
  {
    SectionReader r(doc, "ga");
    GAConfig& g = m.ga;
    r.integer("population", g.population);
    r.integer("generations", g.generations);
    r.real("crossover_rate", g.crossover_rate);
    r.real("mutation_rate", g.mutation_rate);
    grouped(r, "mutation_sigma", g.mutation_sigma);
    r.real("mutation_decay", g.mutation_decay);
    double bound_length = g.upper[KinematicErrorVector::kA];
    double bound_angle = g.upper[KinematicErrorVector::kTheta];
    r.real("bound_length", bound_length);
    r.real("bound_angle", bound_angle);
    g.lower = PFConfig::grouped(-bound_length, -bound_angle);
    g.upper = PFConfig::grouped(bound_length, bound_angle);
    r.integer("elitism", g.elitism);
    r.integer("seed", g.seed);
  }
  guarded(doc, "ga", [&] { m.ga.validate(); });
  {
    SectionReader r(doc, "svm");
    SVMConfig& s = m.svm;
    r.integer("hidden_width", s.hidden_width);
    r.integer("reference_count", s.reference_count);
    r.real("lambda1", s.lambda1);
    r.real("learning_rate", s.learning_rate);
    r.real("momentum", s.momentum);
    r.integer("epochs", s.epochs);
    r.real("init_scale", s.init_scale);
    r.real("output_init_scale", s.output_init_scale);
    r.real("validation_fraction", s.validation_fraction);
    r.integer("seed", s.seed);
  }
  guarded(doc, "svm", [&] { m.svm.validate(); });
  m.lmga.ga = m.ga;
  m.lmga.lm = m.lm;
  m.sga.ga = m.ga;
  m.sga.svm = m.svm;
  {
    SectionReader r(doc, "ensemble");
    if (const auto* e = r.get("order")) {
      cfg.ensemble.order.clear();
      for (const auto& w : split_words(e->value)) {
        try {
          cfg.ensemble.order.push_back(parse_method(w));
        } catch (const std::invalid_argument& ex) {
          r.fail(e->line, std::string("order: ") + ex.what());
        }
      }
    }
    r.real("shrinkage", cfg.ensemble.shrinkage);
  }
  guarded(doc, "ensemble", [&] { cfg.ensemble.validate(); });
  {
    SectionReader r(doc, "output");
    if (const auto* e = r.get("directory")) {
      std::filesystem::path p = e->value;
      cfg.output_directory = p.is_relative() ? base / p : p;
    }
  }
  return cfg;
}

}  // namespace armcal
