#include "dampc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dampc {

using nlohmann::json;

namespace {

// Reads the members of one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "top level" : path_, "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(where(key), "expected a number");
      out = v->get<double>();
    }
  }

  void count(const char* key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(where(key), "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }

  void seed(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(where(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void threads(const char* key, unsigned& out) {
    std::size_t n = out;
    count(key, n);
    if (n > 4096) fail(where(key), "too many threads");
    out = static_cast<unsigned>(n);
  }

  void text(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(where(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void vec(const char* key, Vec2& out) {
    if (const json* v = find(key)) out = to_vec(*v, where(key));
  }

  void matrix(const char* key, Sym2& out) {
    const json* v = find(key);
    if (!v) return;
    const std::string at = where(key);
    if (!v->is_array() || v->size() != 2) fail(at, "expected [[xx, xy], [yx, yy]]");
    const Vec2 r0 = to_vec((*v)[0], at);
    const Vec2 r1 = to_vec((*v)[1], at);
    if (r0.y != r1.x) fail(at, "matrix must be symmetric");
    out = Sym2{r0.x, r0.y, r1.y};
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) fail(where(item.key().c_str()), "unknown key");
  }

  [[noreturn]] static void fail(const std::string& at, const std::string& what) {
    throw ConfigError(at + ": " + what);
  }

  static Vec2 to_vec(const json& v, const std::string& at) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(at, "expected a pair of numbers");
    return {v[0].get<double>(), v[1].get<double>()};
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Parse>
auto guarded(const std::string& at, Parse&& parse) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(at + ": " + e.what());
  }
}

void read_control(Reader& root, ControllerConfig& c) {
  const json* v = root.find("control");
  if (!v) return;
  Reader r(*v, "control");
  r.number("phi", c.phi);
  r.count("h_max", c.h_max);
  r.count("m", c.m);
  r.number("beta", c.beta);
  r.count("k_min", c.k_min);
  r.count("k_max", c.k_max);
  r.threads("threads", c.threads);
  r.finish();
}

void read_pso(Reader& root, SwarmConfig& s) {
  const json* v = root.find("pso");
  if (!v) return;
  Reader r(*v, "pso");
  r.count("iterations", s.iterations);
  r.number("inertia", s.inertia);
  r.number("cognitive", s.cognitive);
  r.number("social", s.social);
  r.finish();
}

void read_limits(Reader& root, ActionLimits& l) {
  const json* v = root.find("limits");
  if (!v) return;
  Reader r(*v, "limits");
  r.number("v_max", l.v_max);
  r.number("rho", l.rho);
  r.finish();
}

void read_init(Reader& root, InitBox& b) {
  const json* v = root.find("init");
  if (!v) return;
  Reader r(*v, "init");
  r.vec("position_min", b.pos_lo);
  r.vec("position_max", b.pos_hi);
  r.vec("velocity_min", b.vel_lo);
  r.vec("velocity_max", b.vel_hi);
  r.finish();
}

void read_cost(Reader& root, CostParams& c) {
  const json* v = root.find("cost");
  if (!v) return;
  Reader r(*v, "cost");
  r.number("w", c.wing.w);
  r.number("theta", c.wing.theta);
  // The default upwash peak scales with the wing span.
  c.upwash = UpwashParams::defaults(c.wing.w);
  if (const json* u = r.find("upwash")) {
    Reader ur(*u, "cost.upwash");
    ur.vec("mu1", c.upwash.mu1);
    ur.vec("mu2", c.upwash.mu2);
    ur.matrix("sigma1", c.upwash.sigma1);
    ur.matrix("sigma2", c.upwash.sigma2);
    ur.finish();
  }
  r.finish();
}

void read_disturbance(Reader& root, std::optional<DisturbanceSpec>& out) {
  const json* v = root.find("disturbance");
  if (!v || v->is_null()) {
    out.reset();
    return;
  }
  Reader r(*v, "disturbance");
  DisturbanceSpec d;
  std::string kind = to_string(d.kind);
  r.text("kind", kind);
  d.kind = guarded("disturbance.kind", [&] { return parse_disturbance_kind(kind); });
  r.number("magnitude", d.magnitude);
  if (const json* s = r.find("schedule")) {
    if (!s->is_array()) Reader::fail("disturbance.schedule", "expected an array of step indices");
    for (const json& t : *s) {
      if (!t.is_number_unsigned()) Reader::fail("disturbance.schedule", "expected non-negative integers");
      d.schedule.push_back(t.get<std::size_t>());
    }
  }
  if (const json* t = r.find("target"); t && !t->is_null()) {
    if (!t->is_number_unsigned()) Reader::fail("disturbance.target", "expected a bird index or null");
    d.target = t->get<std::size_t>();
  }
  if (const json* dir = r.find("direction"); dir && !dir->is_null())
    d.direction = Reader::to_vec(*dir, "disturbance.direction");
  r.finish();
  out = d;
}

void read_output(Reader& root, OutputPaths& o) {
  const json* v = root.find("output");
  if (!v) return;
  Reader r(*v, "output");
  r.text("dir", o.dir);
  r.text("trace", o.trace);
  r.text("summary", o.summary);
  r.text("runs", o.runs);
  r.text("stats", o.stats);
  r.text("table", o.table);
  r.text("plot", o.plot);
  r.finish();
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json sym_json(const Sym2& s) { return json::array({json::array({s.xx, s.xy}), json::array({s.xy, s.yy})}); }

}  // namespace

std::filesystem::path OutputPaths::resolve(const std::string& file) const {
  const std::filesystem::path p(file);
  return p.is_absolute() ? p : std::filesystem::path(dir) / p;
}

void AppConfig::validate() const {
  guarded("config", [&] {
    experiment.validate();
    return 0;
  });
  if (experiment.disturbance && experiment.disturbance->target &&
      *experiment.disturbance->target >= experiment.birds)
    throw ConfigError("disturbance.target: bird index out of range");
  if (controllers.empty()) throw ConfigError("controllers: at least one controller is required");
  for (std::size_t i = 0; i < controllers.size(); ++i)
    for (std::size_t j = i + 1; j < controllers.size(); ++j)
      if (controllers[i] == controllers[j]) throw ConfigError("controllers: duplicate entry");
  const std::string* names[] = {&output.trace, &output.summary, &output.runs,
                                &output.stats, &output.table,   &output.plot};
  for (const std::string* n : names)
    if (n->empty()) throw ConfigError("output: file names must not be empty");
}

AppConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }

  AppConfig cfg;
  ExperimentConfig& x = cfg.experiment;
  Reader r(doc, "");
  r.count("birds", x.birds);
  r.seed("seed", x.base_seed);

  std::string kind = to_string(x.kind);
  r.text("controller", kind);
  x.kind = guarded("controller", [&] { return parse_controller_kind(kind); });
  if (const json* list = r.find("controllers")) {
    if (!list->is_array()) Reader::fail("controllers", "expected an array of controller names");
    cfg.controllers.clear();
    for (const json& c : *list) {
      if (!c.is_string()) Reader::fail("controllers", "expected controller names");
      cfg.controllers.push_back(guarded("controllers", [&] { return parse_controller_kind(c.get<std::string>()); }));
    }
  }

  if (const json* runs = r.find("runs"); runs && !runs->is_null()) {
    if (!runs->is_number_unsigned()) Reader::fail("runs", "expected a positive integer or null");
    x.runs = runs->get<std::size_t>();
  }
  r.number("epsilon", x.epsilon);
  r.number("delta", x.delta);
  std::string mode = to_string(x.sample_size);
  r.text("sample_size", mode);
  x.sample_size = guarded("sample_size", [&] { return parse_sample_size_mode(mode); });
  r.threads("threads", x.threads);
  r.count("post_goal_steps", x.post_goal_steps);

  read_control(r, x.controller);
  read_pso(r, x.controller.swarm);
  read_limits(r, x.controller.limits);
  read_init(r, x.init);
  read_cost(r, x.controller.cost);
  read_disturbance(r, x.disturbance);
  read_output(r, cfg.output);
  r.finish();

  cfg.validate();
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw ConfigError(path.string() + ": read error");
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_config(const AppConfig& cfg, int indent) {
  const ExperimentConfig& x = cfg.experiment;
  const ControllerConfig& c = x.controller;
  json controllers = json::array();
  for (ControllerKind k : cfg.controllers) controllers.push_back(to_string(k));

  json disturbance = nullptr;
  if (x.disturbance) {
    const DisturbanceSpec& d = *x.disturbance;
    disturbance = {{"kind", to_string(d.kind)},
                   {"magnitude", d.magnitude},
                   {"schedule", d.schedule},
                   {"target", d.target ? json(*d.target) : json(nullptr)},
                   {"direction", d.direction ? vec_json(*d.direction) : json(nullptr)}};
  }

  json doc = {
      {"birds", x.birds},
      {"seed", x.base_seed},
      {"controller", to_string(x.kind)},
      {"controllers", controllers},
      {"runs", x.runs ? json(*x.runs) : json(nullptr)},
      {"epsilon", x.epsilon},
      {"delta", x.delta},
      {"sample_size", to_string(x.sample_size)},
      {"threads", x.threads},
      {"post_goal_steps", x.post_goal_steps},
      {"control",
       {{"phi", c.phi},
        {"h_max", c.h_max},
        {"m", c.m},
        {"beta", c.beta},
        {"k_min", c.k_min},
        {"k_max", c.k_max},
        {"threads", c.threads}}},
      {"pso",
       {{"iterations", c.swarm.iterations},
        {"inertia", c.swarm.inertia},
        {"cognitive", c.swarm.cognitive},
        {"social", c.swarm.social}}},
      {"limits", {{"v_max", c.limits.v_max}, {"rho", c.limits.rho}}},
      {"init",
       {{"position_min", vec_json(x.init.pos_lo)},
        {"position_max", vec_json(x.init.pos_hi)},
        {"velocity_min", vec_json(x.init.vel_lo)},
        {"velocity_max", vec_json(x.init.vel_hi)}}},
      {"cost",
       {{"w", c.cost.wing.w},
        {"theta", c.cost.wing.theta},
        {"upwash",
         {{"mu1", vec_json(c.cost.upwash.mu1)},
          {"mu2", vec_json(c.cost.upwash.mu2)},
          {"sigma1", sym_json(c.cost.upwash.sigma1)},
          {"sigma2", sym_json(c.cost.upwash.sigma2)}}}}},
      {"disturbance", disturbance},
      {"output",
       {{"dir", cfg.output.dir},
        {"trace", cfg.output.trace},
        {"summary", cfg.output.summary},
        {"runs", cfg.output.runs},
        {"stats", cfg.output.stats},
        {"table", cfg.output.table},
        {"plot", cfg.output.plot}}},
  };
  return doc.dump(indent);
}

}  // namespace dampc
