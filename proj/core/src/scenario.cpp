#include "hcca/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hcca/error.hpp"

namespace hcca {

using json = nlohmann::json;

namespace {

// Reads a JSON object while tracking which keys were consumed, so that
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
  {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key)
  {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <typename T>
  void number(const std::string& key, T& out)
  {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      if constexpr (std::is_integral_v<T>) {
        const double d = v->get<double>();
        if (d != std::floor(d)) throw ConfigError(field(key), "expected an integer");
        out = static_cast<T>(v->get<std::int64_t>());
      } else {
        out = v->get<T>();
      }
    }
  }

  // Duration given as a number in the unit implied by `scale` (ns per unit).
  void duration(const std::string& key, Duration& out, double scale)
  {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      const double d = v->get<double>();
      if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
      out = Duration{std::llround(d * scale)};
    }
  }

  void boolean(const std::string& key, bool& out)
  {
    if (const json* v = get(key)) {
      if (v->is_boolean())
        out = v->get<bool>();
      else if (v->is_string() && (*v == "on" || *v == "true"))
        out = true;
      else if (v->is_string() && (*v == "off" || *v == "false"))
        out = false;
      else
        throw ConfigError(field(key), "expected true/false or on/off");
    }
  }

  bool string(const std::string& key, std::string& out)
  {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
      return true;
    }
    return false;
  }

  void finish() const
  {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown configuration key");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

constexpr double kUs = 1e3;
constexpr double kMs = 1e6;
constexpr double kS = 1e9;

void read_phy(const json& j, phy::PhyParams& p)
{
  ObjectReader r(j, "phy");
  r.duration("sifs_us", p.sifs, kUs);
  r.duration("pifs_us", p.pifs, kUs);
  r.duration("slot_time_us", p.slot_time, kUs);
  r.number("preamble_bits", p.preamble_len);
  r.number("plcp_header_bits", p.plcp_header_len);
  r.number("mac_header_bytes", p.mac_header);
  r.number("data_rate_bps", p.data_rate);
  r.number("basic_rate_bps", p.basic_rate);
  r.number("ack_frame_bytes", p.ack_frame);
  r.number("poll_frame_bytes", p.poll_frame);
  r.number("beacon_frame_bytes", p.beacon_frame);
  r.finish();
}

void read_tspec(const json& j, const std::string& path, StationSpec& s)
{
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    const auto preset = sched::tspec_preset(name);
    if (!preset) throw ConfigError(path, "unknown TSPEC preset '" + name + "'");
    s.tspec = *preset;
    s.tspec_name = name;
    return;
  }
  ObjectReader r(j, path);
  std::string preset_name;
  if (r.string("preset", preset_name)) {
    const auto preset = sched::tspec_preset(preset_name);
    if (!preset) throw ConfigError(r.field("preset"), "unknown TSPEC preset '" + preset_name + "'");
    s.tspec = *preset;
    s.tspec_name = preset_name;
  } else {
    s.tspec_name = "custom";
  }
  const sched::Tspec before = s.tspec;
  r.number("mean_data_rate_bps", s.tspec.mean_data_rate);
  r.number("nominal_msdu_bytes", s.tspec.nominal_msdu);
  r.number("max_msdu_bytes", s.tspec.max_msdu);
  r.duration("delay_bound_ms", s.tspec.delay_bound, kMs);
  r.duration("max_service_interval_ms", s.tspec.max_service_interval, kMs);
  r.number("phys_rate_bps", s.tspec.phys_rate);
  r.finish();
  if (!(s.tspec == before)) s.tspec_name = "custom";
}

void read_traffic(const json& j, const std::string& path, const std::string& base_dir, StationSpec& s)
{
  ObjectReader r(j, path);
  std::string trace_path;
  const bool has_trace = r.string("trace", trace_path);
  const json* syn = r.get("synthetic");
  if (has_trace && syn) throw ConfigError(path, "give either 'trace' or 'synthetic', not both");
  if (has_trace) {
    std::filesystem::path p(trace_path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    try {
      s.traffic.trace = std::make_shared<traffic::VideoTrace>(traffic::load_trace(p.string()));
    } catch (const Error& e) {
      throw ConfigError(r.field("trace"), e.what());
    }
    s.traffic.trace_path = trace_path;
  } else if (syn) {
    s.traffic.trace.reset();
    s.traffic.trace_path.clear();
    ObjectReader sr(*syn, r.field("synthetic"));
    sr.string("gop", s.traffic.synthetic.gop);
    if (const json* sizes = sr.get("sizes")) {
      if (!sizes->is_array() || sizes->size() != 3 || !(*sizes)[0].is_number_integer() ||
          !(*sizes)[1].is_number_integer() || !(*sizes)[2].is_number_integer())
        throw ConfigError(sr.field("sizes"), "expected [I, P, B] byte sizes");
      s.traffic.synthetic.sizes = {(*sizes)[0].get<Bytes>(), (*sizes)[1].get<Bytes>(), (*sizes)[2].get<Bytes>()};
    }
    sr.number("jitter", s.traffic.synthetic.jitter);
    sr.number("frames", s.traffic.synthetic.frames);
    sr.finish();
  }
  r.finish();
}

void read_station(const json& j, const std::string& path, const std::string& base_dir, StationSpec& s)
{
  ObjectReader r(j, path);
  if (const json* t = r.get("tspec")) read_tspec(*t, r.field("tspec"), s);
  if (const json* t = r.get("traffic")) read_traffic(*t, r.field("traffic"), base_dir, s);
  r.finish();
}

std::vector<SchedulerKind> read_schedulers(const json& j, const std::string& path)
{
  std::vector<std::string> names;
  if (j.is_string()) {
    std::stringstream ss(j.get<std::string>());
    for (std::string tok; std::getline(ss, tok, ',');)
      if (!tok.empty()) names.push_back(tok);
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (!e.is_string()) throw ConfigError(path, "expected scheduler names");
      names.push_back(e.get<std::string>());
    }
  } else {
    throw ConfigError(path, "expected a list of scheduler names");
  }
  std::vector<SchedulerKind> out;
  for (const auto& n : names) {
    const auto k = parse_scheduler(n);
    if (!k) throw ConfigError(path, "unknown scheduler '" + n + "'");
    if (std::find(out.begin(), out.end(), *k) == out.end()) out.push_back(*k);
  }
  if (out.empty()) throw ConfigError(path, "at least one scheduler is required");
  return out;
}

ScenarioConfig from_json(const json& doc, const std::string& base_dir)
{
  ScenarioConfig c;
  ObjectReader r(doc, "");

  if (const json* p = r.get("phy")) read_phy(*p, c.phy);
  r.duration("beacon_interval_ms", c.beacon_interval, kMs);
  r.duration("cp_reservation_ms", c.cp_reservation, kMs);

  std::string s;
  if (r.string("scheduler", s)) {
    const auto k = parse_scheduler(s);
    if (!k) throw ConfigError("scheduler", "expected 'reference' or 'adaptive', got '" + s + "'");
    c.scheduler = *k;
  }
  r.boolean("admission", c.admission);
  if (r.string("reject_policy", s)) {
    if (s == "abort")
      c.reject_policy = RejectPolicy::abort;
    else if (s == "ignore")
      c.reject_policy = RejectPolicy::ignore;
    else
      throw ConfigError("reject_policy", "expected 'abort' or 'ignore'");
  }

  // Template station: shared TSPEC and traffic, overridable per station.
  StationSpec tmpl;
  if (const json* t = r.get("tspec")) read_tspec(*t, "tspec", tmpl);
  if (const json* t = r.get("traffic")) read_traffic(*t, "traffic", base_dir, tmpl);

  if (const json* st = r.get("stations")) {
    if (st->is_number()) {
      if (!st->is_number_integer() || st->get<std::int64_t>() < 1)
        throw ConfigError("stations", "station count must be a positive integer");
      c.stations.assign(st->get<std::size_t>(), tmpl);
    } else if (st->is_array()) {
      if (st->empty()) throw ConfigError("stations", "station list must not be empty");
      c.stations.clear();
      for (std::size_t i = 0; i < st->size(); ++i) {
        StationSpec spec = tmpl;
        read_station((*st)[i], "stations[" + std::to_string(i) + "]", base_dir, spec);
        c.stations.push_back(std::move(spec));
      }
    } else {
      throw ConfigError("stations", "expected a station count or a list of stations");
    }
  } else {
    c.stations.assign(1, tmpl);
  }

  r.duration("traffic_start_s", c.traffic_start, kS);
  r.duration("duration_s", c.duration, kS);
  r.duration("frame_interval_ms", c.frame_interval, kMs);
  r.number("loss_p", c.loss_p);
  r.boolean("qs_exact", c.qs_exact);
  if (r.string("overhead_mode", s)) {
    if (s == "per_msdu")
      c.overhead_mode = phy::OverheadMode::per_msdu;
    else if (s == "paper_literal")
      c.overhead_mode = phy::OverheadMode::paper_literal;
    else
      throw ConfigError("overhead_mode", "expected 'per_msdu' or 'paper_literal'");
  }
  r.boolean("paper_literal_throughput", c.paper_literal_throughput);
  r.boolean("stagger", c.stagger);
  r.boolean("reclaim_unused_txop", c.reclaim_unused_txop);
  if (const json* v = r.get("seed")) {
    if (!v->is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    c.seed = v->get<std::uint64_t>();
  }
  r.string("out", c.out_dir);
  if (const json* sw = r.get("sweep")) {
    ObjectReader sr(*sw, "sweep");
    if (const json* v = sr.get("stations")) {
      if (v->is_string()) {
        try {
          c.sweep_stations = parse_station_range(v->get<std::string>());
        } catch (const Error& e) {
          throw ConfigError("sweep.stations", e.what());
        }
      } else if (v->is_array() && v->size() == 2 && (*v)[0].is_number_unsigned() && (*v)[1].is_number_unsigned()) {
        c.sweep_stations = {(*v)[0].get<std::size_t>(), (*v)[1].get<std::size_t>()};
      } else {
        throw ConfigError("sweep.stations", "expected \"A..B\" or [A, B]");
      }
    }
    if (const json* v = sr.get("schedulers")) c.sweep_schedulers = read_schedulers(*v, "sweep.schedulers");
    sr.finish();
  }
  r.finish();
  c.validate();
  return c;
}

void apply_override(json& doc, const Override& o)
{
  if (o.key.empty()) throw ConfigError("--set", "empty key");
  json value;
  try {
    value = json::parse(o.value);
  } catch (const json::parse_error&) {
    value = o.value;
  }

  json* node = &doc;
  std::stringstream ss(o.key);
  std::vector<std::string> parts;
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& child = (*node)[parts[i]];
    // A preset name grows into an object so single fields can be overridden.
    if (child.is_string() && parts[i] == "tspec") child = json{{"preset", child.get<std::string>()}};
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError(o.key, "cannot set a field inside a non-object value");
    node = &child;
  }
  (*node)[parts.back()] = value;
}

json station_json(const StationSpec& s)
{
  json j;
  j["tspec"] = {{"name", s.tspec_name},
                {"rho", s.tspec.mean_data_rate},
                {"L", s.tspec.nominal_msdu},
                {"M", s.tspec.max_msdu},
                {"D", s.tspec.delay_bound.count()},
                {"MSI", s.tspec.max_service_interval.count()},
                {"R", s.tspec.phys_rate}};
  if (s.traffic.is_file()) {
    j["traffic"] = {{"trace", s.traffic.trace_path}};
  } else {
    const auto& y = s.traffic.synthetic;
    j["traffic"] = {{"gop", y.gop},
                    {"sizes", {y.sizes.i, y.sizes.p, y.sizes.b}},
                    {"jitter", y.jitter},
                    {"frames", y.frames}};
  }
  return j;
}

}  // namespace

const char* to_string(SchedulerKind k)
{
  return k == SchedulerKind::reference ? "reference" : "adaptive";
}

std::optional<SchedulerKind> parse_scheduler(const std::string& s)
{
  if (s == "reference") return SchedulerKind::reference;
  if (s == "adaptive") return SchedulerKind::adaptive;
  return std::nullopt;
}

void ScenarioConfig::validate() const
{
  phy.validate();
  if (beacon_interval.count() <= 0) throw ConfigError("beacon_interval_ms", "must be strictly positive");
  if (cp_reservation.count() < 0 || cp_reservation >= beacon_interval)
    throw ConfigError("cp_reservation_ms", "must lie in [0, beacon_interval_ms)");
  if (stations.empty()) throw ConfigError("stations", "at least one station is required");
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const auto& s = stations[i];
    try {
      s.tspec.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("stations[" + std::to_string(i) + "]." + e.field(), "invalid TSPEC");
    }
    if (!s.traffic.is_file()) {
      const auto& y = s.traffic.synthetic;
      const std::string f = "stations[" + std::to_string(i) + "].traffic.synthetic";
      if (y.gop.empty() || y.gop.find_first_not_of("IPB") != std::string::npos)
        throw ConfigError(f + ".gop", "pattern must be non-empty over {I, P, B}");
      if (y.sizes.i <= 0 || y.sizes.p <= 0 || y.sizes.b <= 0)
        throw ConfigError(f + ".sizes", "sizes must be strictly positive");
      if (!(y.jitter >= 0.0 && y.jitter < 1.0)) throw ConfigError(f + ".jitter", "must lie in [0, 1)");
    } else if (s.traffic.trace->records.empty()) {
      throw ConfigError("stations[" + std::to_string(i) + "].traffic.trace", "trace is empty");
    }
  }
  if (traffic_start.count() < 0) throw ConfigError("traffic_start_s", "must not be negative");
  if (duration.count() < 0) throw ConfigError("duration_s", "must not be negative");
  if (frame_interval.count() <= 0) throw ConfigError("frame_interval_ms", "must be strictly positive");
  if (!(loss_p >= 0.0 && loss_p < 1.0)) throw ConfigError("loss_p", "must lie in [0, 1)");
  if (sweep_stations.first < 1 || sweep_stations.first > sweep_stations.second)
    throw ConfigError("sweep.stations", "range must satisfy 1 <= A <= B");
  if (sweep_schedulers.empty()) throw ConfigError("sweep.schedulers", "at least one scheduler is required");
}

std::string ScenarioConfig::quality() const
{
  if (stations.empty()) return "none";
  for (const auto& s : stations)
    if (s.tspec_name != stations.front().tspec_name) return "mixed";
  return stations.front().tspec_name;
}

ScenarioConfig ScenarioConfig::with_stations(std::size_t n) const
{
  ScenarioConfig c = *this;
  c.stations.assign(n, stations.front());
  return c;
}

Override parse_override(const std::string& kv)
{
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(kv, "override must look like key=value");
  return Override{kv.substr(0, eq), kv.substr(eq + 1)};
}

ScenarioConfig load_scenario_text(const std::string& json_text, const std::vector<Override>& overrides,
                                  const std::string& base_dir)
{
  json doc = json::object();
  if (!json_text.empty()) {
    try {
      doc = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
      throw ConfigError("<config>", e.what());
    }
  }
  if (!doc.is_object()) throw ConfigError("<config>", "top level must be an object");
  for (const auto& o : overrides) apply_override(doc, o);
  return from_json(doc, base_dir);
}

ScenarioConfig load_scenario(const std::optional<std::string>& path, const std::vector<Override>& overrides)
{
  if (!path) return load_scenario_text("", overrides, ".");
  std::ifstream in(*path);
  if (!in) throw ConfigError("--config", "cannot read '" + *path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(*path).parent_path();
  return load_scenario_text(buf.str(), overrides, dir.empty() ? "." : dir.string());
}

std::pair<std::size_t, std::size_t> parse_station_range(const std::string& s)
{
  auto to_count = [&](const std::string& t) -> std::size_t {
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
      throw Error("bad station range '" + s + "'");
    return static_cast<std::size_t>(std::stoull(t));
  };
  const auto dots = s.find("..");
  std::pair<std::size_t, std::size_t> r;
  if (dots == std::string::npos)
    r = {to_count(s), to_count(s)};
  else
    r = {to_count(s.substr(0, dots)), to_count(s.substr(dots + 2))};
  if (r.first < 1 || r.first > r.second) throw Error("station range '" + s + "' must satisfy 1 <= A <= B");
  return r;
}

std::string template_key(const ScenarioConfig& c)
{
  json j;
  const auto& p = c.phy;
  j["phy"] = {p.sifs.count(), p.pifs.count(), p.slot_time.count(), p.preamble_len, p.plcp_header_len,
              p.mac_header, p.data_rate, p.basic_rate, p.ack_frame, p.poll_frame, p.beacon_frame};
  j["beacon"] = c.beacon_interval.count();
  j["cp"] = c.cp_reservation.count();
  j["admission"] = c.admission;
  j["reject_policy"] = static_cast<int>(c.reject_policy);
  std::set<std::string> distinct;
  for (const auto& s : c.stations) distinct.insert(station_json(s).dump());
  j["station_specs"] = distinct;
  j["traffic_start"] = c.traffic_start.count();
  j["duration"] = c.duration.count();
  j["frame_interval"] = c.frame_interval.count();
  j["loss_p"] = c.loss_p;
  j["qs_exact"] = c.qs_exact;
  j["overhead_mode"] = static_cast<int>(c.overhead_mode);
  j["paper_literal_throughput"] = c.paper_literal_throughput;
  j["stagger"] = c.stagger;
  j["reclaim"] = c.reclaim_unused_txop;
  return j.dump();
}

}  // namespace hcca
