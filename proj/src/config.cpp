#include "tdwsmir/config.hpp"

#include <fstream>
#include <set>

#include "tdwsmir/error.hpp"

namespace tdw {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object that remembers which keys were read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  ~Section() = default;

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Section child(const std::string& key) { return Section(raw(key), join(path_, key)); }

  std::string field(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  template <std::size_t N>
  std::array<double, N> numbers(const std::string& key, const std::array<double, N>& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array() || v.size() != N) throw ConfigError(field(key), "expected " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      out[i] = v[i].get<double>();
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

template <typename Fn>
auto wrap(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  Section top(j, "");

  if (top.has("provenance")) c.provenance = top.raw("provenance");

  if (top.has("room")) {
    Section s = top.child("room");
    c.room.dimensions = s.numbers<3>("dimensions_m", c.room.dimensions);
    c.room.beta = s.numbers<6>("beta", c.room.beta);
    s.finish();
  }

  if (top.has("source")) {
    Section s = top.child("source");
    c.source.position = s.numbers<3>("position_m", c.source.position);
    c.source.order = s.integer("order", c.source.order);
    if (s.has("orientation")) {
      Section o = s.child("orientation");
      const bool has_aim = o.has("aim_at_array"), has_euler = o.has("euler_zyz_rad");
      if (has_aim == has_euler) throw ConfigError(s.field("orientation"), "give exactly one of aim_at_array or euler_zyz_rad");
      if (has_aim) {
        c.source.aim_at_array = o.boolean("aim_at_array", true);
        if (!c.source.aim_at_array) c.source.orientation = EulerAngles::identity();
      } else {
        const auto e = o.numbers<3>("euler_zyz_rad", {0, 0, 0});
        c.source.aim_at_array = false;
        c.source.orientation = {e[0], e[1], e[2]};
      }
      o.finish();
    }
    if (s.has("directivity")) {
      Section d = s.child("directivity");
      const bool has_kind = d.has("kind"), has_bundle = d.has("bundle");
      if (has_kind == has_bundle) throw ConfigError(s.field("directivity"), "give exactly one of kind or bundle");
      if (has_kind) {
        const std::string kind = d.text("kind", "");
        c.source.pattern = wrap(d.field("kind"), [&] { return AnalyticPattern::parse(kind); });
        c.source.bundle.reset();
      } else {
        c.source.bundle = resolve(base_dir, d.text("bundle", ""));
        c.source.pattern.reset();
        c.source.analysis.farfield_compensation = d.boolean("farfield_compensation", true);
        c.source.analysis.regularization = d.number("regularization", c.source.analysis.regularization);
        c.source.analysis.max_condition = d.number("max_condition", c.source.analysis.max_condition);
      }
      d.finish();
    }
    s.finish();
  }

  if (top.has("array")) {
    Section s = top.child("array");
    c.array.center = s.numbers<3>("center_m", c.array.center);
    c.array.radius = s.number("radius_m", c.array.radius);
    const std::string grid = s.text("grid", c.array.grid);
    c.array.grid = grid == "eigenmike32" ? grid : resolve(base_dir, grid).string();
    s.finish();
  }

  if (top.has("simulation")) {
    Section s = top.child("simulation");
    auto& sim = c.simulation;
    sim.fs = s.number("sample_rate_hz", sim.fs);
    sim.speed_of_sound = s.number("speed_of_sound_mps", sim.speed_of_sound);
    sim.output_order = s.integer("order", sim.output_order);
    sim.duration_s = s.number("duration_s", sim.duration_s);
    const int threads = s.integer("threads", static_cast<int>(sim.threads));
    if (threads < 0) throw ConfigError(s.field("threads"), "must be non-negative");
    sim.threads = static_cast<unsigned>(threads);
    if (s.has("kernel_sampling")) {
      const std::string ks = s.text("kernel_sampling", "");
      sim.sampling = wrap(s.field("kernel_sampling"), [&] { return parse_kernel_sampling(ks); });
    }
    if (s.has("images")) {
      Section im = s.child("images");
      const bool has_count = im.has("count"), has_order = im.has("max_order");
      if (has_count == has_order) throw ConfigError(s.field("images"), "give exactly one of count or max_order");
      sim.images = has_count ? ImageSelection::count(im.integer("count", 1))
                             : ImageSelection::max_order(im.integer("max_order", 0));
      im.finish();
    }
    s.finish();
  }

  if (top.has("filter")) {
    Section s = top.child("filter");
    c.filter.enabled = s.boolean("enabled", c.filter.enabled);
    c.filter.lowpass.cutoff_hz = s.number("cutoff_hz", c.filter.lowpass.cutoff_hz);
    c.filter.lowpass.taps = s.integer("taps", c.filter.lowpass.taps);
    c.filter.lowpass.kaiser_beta = s.number("kaiser_beta", c.filter.lowpass.kaiser_beta);
    s.finish();
  }

  if (top.has("output")) {
    Section s = top.child("output");
    c.output.directory = resolve(base_dir, s.text("directory", c.output.directory.string()));
    c.output.basename = s.text("basename", c.output.basename);
    if (s.has("format")) {
      const std::string f = s.text("format", "");
      c.output.format = wrap(s.field("format"), [&] { return parse_output_format(f); });
    }
    c.output.normalize = s.boolean("normalize", c.output.normalize);
    c.output.write_anechoic = s.boolean("write_anechoic", c.output.write_anechoic);
    s.finish();
  } else {
    c.output.directory = resolve(base_dir, c.output.directory.string());
  }

  if (top.has("compare")) {
    Section s = top.child("compare");
    c.compare.f_min_hz = s.number("frequency_min_hz", c.compare.f_min_hz);
    c.compare.f_max_hz = s.number("frequency_max_hz", c.compare.f_max_hz);
    const int bins = s.integer("frequency_bins", static_cast<int>(c.compare.bins));
    if (bins < 1) throw ConfigError(s.field("frequency_bins"), "must be at least 1");
    c.compare.bins = static_cast<std::size_t>(bins);
    c.compare.split_hz = s.number("split_hz", c.compare.split_hz);
    if (s.has("against")) c.compare.against = resolve(base_dir, s.text("against", ""));
    s.finish();
  }

  top.finish();
  validate_run_config(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": invalid JSON: " + e.what());
  }
  return parse_run_config(j, std::filesystem::absolute(path).parent_path());
}

void validate_run_config(const RunConfig& c) {
  wrap("room", [&] { c.room.validate(); });
  wrap("simulation", [&] { c.simulation.validate(); });
  if (!c.room.strictly_inside(c.source.position)) throw ConfigError("source.position_m", "must lie strictly inside the room");
  if (c.source.order < 0 || c.source.order > kMaxDegree) throw ConfigError("source.order", "out of range");
  if (!(c.array.radius > 0.0)) throw ConfigError("array.radius_m", "must be positive");
  for (int a = 0; a < 3; ++a) {
    if (!(c.array.center[a] - c.array.radius > 0.0 && c.array.center[a] + c.array.radius < c.room.dimensions[a])) {
      throw ConfigError("array.center_m", "array sphere must lie inside the room");
    }
  }
  if (norm(c.source.position - c.array.center) <= c.array.radius) {
    throw ConfigError("source.position_m", "source lies on or inside the array sphere");
  }
  if (c.simulation.images.mode == ImageSelection::Mode::Count && c.simulation.images.value < 1) {
    throw ConfigError("simulation.images.count", "must be at least 1");
  }
  if (c.simulation.images.mode == ImageSelection::Mode::MaxOrder && c.simulation.images.value < 0) {
    throw ConfigError("simulation.images.max_order", "must be non-negative");
  }
  if (c.filter.enabled) wrap("filter", [&] { design_lowpass(c.simulation.fs, c.filter.lowpass); });
  if (c.output.basename.empty() || c.output.basename.find('/') != std::string::npos) {
    throw ConfigError("output.basename", "must be a plain file name");
  }
  if (!(c.compare.f_min_hz > 0.0 && c.compare.f_max_hz >= c.compare.f_min_hz)) {
    throw ConfigError("compare", "need 0 < frequency_min_hz <= frequency_max_hz");
  }
  if (c.compare.f_max_hz >= c.simulation.fs / 2.0) throw ConfigError("compare.frequency_max_hz", "must be below fs/2");
}

json to_json(const RunConfig& c) {
  json j;
  if (!c.provenance.is_null()) j["provenance"] = c.provenance;
  j["room"] = {{"dimensions_m", vec_json(c.room.dimensions)},
               {"beta", json(std::vector<double>(c.room.beta.begin(), c.room.beta.end()))}};

  json src = {{"position_m", vec_json(c.source.position)}, {"order", c.source.order}};
  if (c.source.aim_at_array) {
    src["orientation"] = {{"aim_at_array", true}};
  } else {
    src["orientation"] = {{"euler_zyz_rad", {c.source.orientation.alpha, c.source.orientation.beta, c.source.orientation.gamma}}};
  }
  if (c.source.bundle) {
    src["directivity"] = {{"bundle", c.source.bundle->string()},
                          {"farfield_compensation", c.source.analysis.farfield_compensation},
                          {"regularization", c.source.analysis.regularization},
                          {"max_condition", c.source.analysis.max_condition}};
  } else {
    src["directivity"] = {{"kind", c.source.pattern.value_or(AnalyticPattern{}).name()}};
  }
  j["source"] = src;

  j["array"] = {{"center_m", vec_json(c.array.center)}, {"radius_m", c.array.radius}, {"grid", c.array.grid}};

  const auto& sim = c.simulation;
  json images = sim.images.mode == ImageSelection::Mode::Count ? json{{"count", sim.images.value}}
                                                                : json{{"max_order", sim.images.value}};
  j["simulation"] = {{"sample_rate_hz", sim.fs},         {"speed_of_sound_mps", sim.speed_of_sound},
                     {"order", sim.output_order},        {"images", images},
                     {"duration_s", sim.duration_s},     {"threads", sim.threads},
                     {"kernel_sampling", to_string(sim.sampling)}};
  j["filter"] = {{"enabled", c.filter.enabled},
                 {"cutoff_hz", c.filter.lowpass.cutoff_hz},
                 {"taps", c.filter.lowpass.taps},
                 {"kaiser_beta", c.filter.lowpass.kaiser_beta}};
  j["output"] = {{"directory", c.output.directory.string()}, {"basename", c.output.basename},
                 {"format", to_string(c.output.format)},     {"normalize", c.output.normalize},
                 {"write_anechoic", c.output.write_anechoic}};
  j["compare"] = {{"frequency_min_hz", c.compare.f_min_hz},
                  {"frequency_max_hz", c.compare.f_max_hz},
                  {"frequency_bins", c.compare.bins},
                  {"split_hz", c.compare.split_hz}};
  if (c.compare.against) j["compare"]["against"] = c.compare.against->string();
  return j;
}

SourceSpec make_source_spec(const RunConfig& c) {
  SourceSpec s;
  s.position = c.source.position;
  s.order = c.source.order;
  s.analysis = c.source.analysis;
  s.analysis.speed_of_sound = c.simulation.speed_of_sound;
  if (c.source.aim_at_array) {
    const SphericalAngles d = direction_angles(c.array.center - c.source.position);
    s.orientation = EulerAngles::aim(d.theta, d.phi);
  } else {
    s.orientation = c.source.orientation;
  }
  if (c.source.bundle) {
    s.directivity = load_directivity_bundle(*c.source.bundle);
  } else {
    s.directivity = c.source.pattern.value_or(AnalyticPattern{});
  }
  return s;
}

MicArraySpec make_array_spec(const RunConfig& c) {
  MicArraySpec a = MicArraySpec::eigenmike32(c.array.center, c.array.radius);
  if (c.array.grid != "eigenmike32") a.mics = load_direction_table(c.array.grid);
  a.validate();
  return a;
}

}  // namespace tdw
