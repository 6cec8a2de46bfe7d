#include "selinf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selinf/errors.hpp"

namespace selinf {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string at_key(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(at_key(path, key), "missing");
  return *it;
}

const json& require_array(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw ParseError(at_key(path, key), "expected an array");
  return v;
}

std::string label_of(const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 1e15) return std::to_string(static_cast<long long>(d));
    return v.dump();
  }
  throw ParseError(path, "expected a string or number label");
}

std::string name_of(const json& obj, const std::string& path) {
  const json& v = require(obj, "name", path);
  if (!v.is_string() || v.get<std::string>().empty()) throw ParseError(at_key(path, "name"), "expected a nonempty string");
  return v.get<std::string>();
}

double number_of(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(path, "not finite");
  return d;
}

OutputValue value_of(const json& v, const std::string& path) {
  if (v.is_number()) return {label_of(v, path), number_of(v, path)};
  if (v.is_string()) return {v.get<std::string>(), std::nullopt};
  if (!v.is_object()) throw ParseError(path, "expected a value object, number or string");
  OutputValue out{label_of(require(v, "label", path), at_key(path, "label")), std::nullopt};
  if (auto it = v.find("numeric"); it != v.end() && !it->is_null()) out.numeric = number_of(*it, at_key(path, "numeric"));
  return out;
}

std::size_t find_label(const std::vector<std::string>& labels, const std::string& label, const std::string& path,
                       const std::string& what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw ParseError(path, "unknown " + what + " '" + label + "'");
}

std::vector<std::string> value_labels(const OutputSpec& out) {
  std::vector<std::string> labels;
  for (const auto& v : out.values) labels.push_back(v.label);
  return labels;
}

System parse_system(const json& root) {
  System sys;
  auto& d = sys.design;
  const json& inputs = require_array(root, "inputs", "");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string path = at_index("inputs", i);
    InputSpec in;
    in.name = name_of(inputs[i], path);
    const json& levels = require_array(inputs[i], "levels", path);
    for (std::size_t l = 0; l < levels.size(); ++l) in.levels.push_back(label_of(levels[l], at_index(at_key(path, "levels"), l)));
    d.inputs.push_back(std::move(in));
  }
  const json& outputs = require_array(root, "outputs", "");
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    const std::string path = at_index("outputs", k);
    OutputSpec out;
    out.name = name_of(outputs[k], path);
    const json& values = require_array(outputs[k], "values", path);
    for (std::size_t v = 0; v < values.size(); ++v) out.values.push_back(value_of(values[v], at_index(at_key(path, "values"), v)));
    d.outputs.push_back(std::move(out));
  }
  if (d.inputs.size() != d.outputs.size()) {
    throw ParseError("outputs", "expected " + std::to_string(d.inputs.size()) + " outputs, one per input");
  }

  std::vector<std::vector<std::string>> values;
  for (const auto& o : d.outputs) values.push_back(value_labels(o));
  const auto shape = d.value_counts();

  const json& treatments = require_array(root, "treatments", "");
  for (std::size_t t = 0; t < treatments.size(); ++t) {
    const std::string path = at_index("treatments", t);
    const json& levels = require(treatments[t], "levels", path);
    const std::string lpath = at_key(path, "levels");
    if (!levels.is_object()) throw ParseError(lpath, "expected an object mapping input names to levels");
    Treatment tr(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
      auto it = levels.find(d.inputs[k].name);
      if (it == levels.end()) throw ParseError(at_key(lpath, d.inputs[k].name), "missing");
      tr[k] = find_label(d.inputs[k].levels, label_of(*it, at_key(lpath, d.inputs[k].name)),
                         at_key(lpath, d.inputs[k].name), "level");
    }
    for (const auto& [key, _] : levels.items()) {
      bool known = false;
      for (const auto& in : d.inputs) known = known || in.name == key;
      if (!known) throw ParseError(at_key(lpath, key), "not an input of the design");
    }
    JointPmf pmf(shape);
    std::set<Tuple> seen;
    const json& entries = require_array(treatments[t], "pmf", path);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const std::string epath = at_index(at_key(path, "pmf"), e);
      const json& tuple = require_array(entries[e], "tuple", epath);
      if (tuple.size() != d.size()) {
        throw ParseError(at_key(epath, "tuple"), "expected " + std::to_string(d.size()) + " labels");
      }
      Tuple idx(d.size());
      for (std::size_t k = 0; k < d.size(); ++k) {
        const std::string tp = at_index(at_key(epath, "tuple"), k);
        idx[k] = find_label(values[k], label_of(tuple[k], tp), tp, "value of " + d.outputs[k].name);
      }
      if (!seen.insert(idx).second) throw ParseError(at_key(epath, "tuple"), "repeated tuple");
      const json& p = require(entries[e], "p", epath);
      double mass;
      if (p.is_string()) {
        try {
          mass = parse_probability(p.get<std::string>());
        } catch (const ParseError& err) {
          throw ParseError(at_key(epath, "p"), err.what());
        }
      } else {
        mass = number_of(p, at_key(epath, "p"));
      }
      pmf.add(idx, mass);
    }
    d.treatments.push_back(std::move(tr));
    sys.distributions.push_back(std::move(pmf));
  }
  return sys;
}

RtSystem parse_rt(const json& v) {
  RtSystem rt;
  const json& grid = require_array(v, "grid", "rt");
  for (std::size_t i = 0; i < grid.size(); ++i) rt.grid.push_back(number_of(grid[i], at_index("rt.grid", i)));
  const json& cdfs = require(v, "cdfs", "rt");
  if (!cdfs.is_object()) throw ParseError("rt.cdfs", "expected an object keyed by \"i,j\"");
  static const char* keys[] = {"1,1", "1,2", "2,1", "2,2"};
  for (std::size_t c = 0; c < 4; ++c) {
    const json& f = require_array(cdfs, keys[c], "rt.cdfs");
    for (std::size_t i = 0; i < f.size(); ++i) {
      rt.cdf[c].push_back(number_of(f[i], at_index(at_key("rt.cdfs", keys[c]), i)));
    }
  }
  for (const auto& [key, _] : cdfs.items()) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) throw ParseError(at_key("rt.cdfs", key), "expected one of 1,1 1,2 2,1 2,2");
  }
  return rt;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

double parse_probability(std::string_view text) {
  auto number = [&](std::string_view s) {
    double d = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, d);
    if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(d)) {
      throw ParseError("", "not a number: '" + std::string(text) + "'");
    }
    return d;
  };
  // from_chars rejects a leading '+' and a bare leading '.'.
  auto normalize = [](std::string_view s) {
    std::string out(s);
    if (!out.empty() && out[0] == '+') out.erase(0, 1);
    if (!out.empty() && out[0] == '.') out.insert(0, "0");
    if (out.size() > 1 && out[0] == '-' && out[1] == '.') out.insert(1, "0");
    return out;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::string a = normalize(text.substr(0, slash));
    const std::string b = normalize(text.substr(slash + 1));
    const double den = number(b);
    if (den == 0.0) throw ParseError("", "zero denominator in '" + std::string(text) + "'");
    return number(a) / den;
  }
  const std::string s = normalize(text);
  return number(s);
}

Document parse_document(std::string_view text) {
  const json root = parse_json(text);
  if (!root.is_object()) throw ParseError("", "expected a JSON object at top level");
  for (const auto& [key, _] : root.items()) {
    if (key != "inputs" && key != "outputs" && key != "treatments" && key != "rt") {
      throw ParseError(key, "unknown key");
    }
  }
  Document doc;
  const bool has_rt = root.contains("rt");
  const bool has_system = root.contains("inputs") || root.contains("outputs") || root.contains("treatments");
  if (!has_rt && !has_system) throw ParseError("inputs", "missing");
  if (has_system) doc.system = parse_system(root);
  if (has_rt) doc.rt = parse_rt(root["rt"]);
  return doc;
}

Document load_document(const std::string& path) { return parse_document(read_file(path)); }

std::string serialize_document(const Document& doc) {
  ordered_json root = ordered_json::object();
  if (doc.system) {
    const auto& d = doc.system->design;
    root["inputs"] = ordered_json::array();
    for (const auto& in : d.inputs) root["inputs"].push_back({{"name", in.name}, {"levels", in.levels}});
    root["outputs"] = ordered_json::array();
    for (const auto& out : d.outputs) {
      ordered_json values = ordered_json::array();
      for (const auto& v : out.values) {
        ordered_json jv = {{"label", v.label}};
        if (v.numeric) jv["numeric"] = *v.numeric;
        values.push_back(jv);
      }
      root["outputs"].push_back({{"name", out.name}, {"values", values}});
    }
    root["treatments"] = ordered_json::array();
    for (std::size_t t = 0; t < d.treatments.size(); ++t) {
      ordered_json levels = ordered_json::object();
      for (std::size_t k = 0; k < d.size(); ++k) levels[d.inputs[k].name] = d.inputs[k].levels[d.treatments[t][k]];
      ordered_json pmf = ordered_json::array();
      for (const auto& [tuple, mass] : doc.system->pmf(t).support()) {
        ordered_json labels = ordered_json::array();
        for (std::size_t k = 0; k < tuple.size(); ++k) labels.push_back(d.outputs[k].values[tuple[k]].label);
        pmf.push_back({{"tuple", labels}, {"p", mass}});
      }
      root["treatments"].push_back({{"levels", levels}, {"pmf", pmf}});
    }
  }
  if (doc.rt) {
    ordered_json cdfs = ordered_json::object();
    static const char* keys[] = {"1,1", "1,2", "2,1", "2,2"};
    for (std::size_t c = 0; c < 4; ++c) cdfs[keys[c]] = doc.rt->cdf[c];
    root["rt"] = {{"grid", doc.rt->grid}, {"cdfs", cdfs}};
  }
  return root.dump(2) + "\n";
}

std::vector<TransformSpec> parse_transforms(std::string_view text, const Design& design) {
  const json root = parse_json(text);
  const json& list = require_array(root, "transforms", "");
  std::vector<TransformSpec> specs;
  for (std::size_t s = 0; s < list.size(); ++s) {
    const std::string path = at_index("transforms", s);
    TransformSpec spec = identity_transform(design);
    spec.name = list[s].contains("name") ? name_of(list[s], path) : "transform#" + std::to_string(s);
    const json& outputs = require_array(list[s], "outputs", path);
    std::set<std::size_t> done;
    for (std::size_t o = 0; o < outputs.size(); ++o) {
      const std::string opath = at_index(at_key(path, "outputs"), o);
      const json& entry = outputs[o];
      const std::string name = label_of(require(entry, "output", opath), at_key(opath, "output"));
      std::size_t k = design.size();
      for (std::size_t i = 0; i < design.size(); ++i) {
        if (design.outputs[i].name == name) k = i;
      }
      if (k == design.size()) throw ParseError(at_key(opath, "output"), "unknown output '" + name + "'");
      if (!done.insert(k).second) throw ParseError(at_key(opath, "output"), "output listed twice");

      OutputTransform t;
      if (entry.contains("values")) {
        const json& values = require_array(entry, "values", opath);
        for (std::size_t v = 0; v < values.size(); ++v) t.target.push_back(value_of(values[v], at_index(at_key(opath, "values"), v)));
      } else {
        t.target = design.outputs[k].values;
      }
      std::vector<std::string> targets;
      for (const auto& v : t.target) targets.push_back(v.label);
      const auto sources = value_labels(design.outputs[k]);

      auto read_map = [&](const json& m, const std::string& mpath) {
        if (!m.is_object()) throw ParseError(mpath, "expected an object mapping values to target values");
        std::vector<std::size_t> map(sources.size());
        for (std::size_t v = 0; v < sources.size(); ++v) {
          auto it = m.find(sources[v]);
          if (it == m.end()) throw ParseError(at_key(mpath, sources[v]), "value left unmapped");
          map[v] = find_label(targets, label_of(*it, at_key(mpath, sources[v])), at_key(mpath, sources[v]), "target value");
        }
        for (const auto& [key, _] : m.items()) find_label(sources, key, at_key(mpath, key), "value");
        return map;
      };

      const auto& levels = design.inputs[k].levels;
      if (entry.contains("map") == entry.contains("maps")) {
        throw ParseError(opath, "give exactly one of \"map\" or \"maps\"");
      }
      if (entry.contains("map")) {
        t.map.assign(levels.size(), read_map(entry["map"], at_key(opath, "map")));
      } else {
        const json& maps = entry["maps"];
        const std::string mpath = at_key(opath, "maps");
        if (!maps.is_object()) throw ParseError(mpath, "expected an object keyed by level");
        for (const auto& level : levels) {
          auto it = maps.find(level);
          if (it == maps.end()) throw ParseError(at_key(mpath, level), "missing map for level");
          t.map.push_back(read_map(*it, at_key(mpath, level)));
        }
        for (const auto& [key, _] : maps.items()) find_label(levels, key, at_key(mpath, key), "level");
      }
      spec.outputs[k] = std::move(t);
    }
    try {
      check_transform(spec, design);
    } catch (const UsageError& e) {
      throw ParseError(path, e.what());
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<TransformSpec> load_transforms(const std::string& path, const Design& design) {
  return parse_transforms(read_file(path), design);
}

MetricSpec parse_metric(std::string_view spec, const Design& design) {
  const std::string where = "metric '" + std::string(spec) + "'";
  if (spec.rfind("power:", 0) == 0) {
    const std::string_view rest = spec.substr(6);
    if (rest.rfind("p=", 0) != 0) throw ParseError(where, "expected power:p=<exponent>");
    double p;
    try {
      p = parse_probability(rest.substr(2));
    } catch (const ParseError&) {
      throw ParseError(where, "exponent is not a number");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw ParseError(where, "exponent must lie in [0, 1]");
    return PowerMetric{p};
  }
  if (spec.rfind("class:", 0) != 0) throw ParseError(where, "expected power:... or class:...");
  ClassificationMetric cm;
  cm.classes.assign(design.size(), {});
  std::vector<bool> given(design.size(), false);
  std::string_view rest = spec.substr(6);
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    std::string_view part = rest.substr(0, semi);
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw ParseError(where, "expected <output>=<classes>");
    const std::string name(part.substr(0, eq));
    std::size_t k = design.size();
    for (std::size_t i = 0; i < design.size(); ++i) {
      if (design.outputs[i].name == name) k = i;
    }
    if (k == design.size()) throw ParseError(where, "unknown output '" + name + "'");
    if (given[k]) throw ParseError(where, "output '" + name + "' listed twice");
    given[k] = true;
    const auto labels = value_labels(design.outputs[k]);
    auto& cls = cm.classes[k];
    cls.assign(labels.size(), labels.size());
    std::string_view groups = part.substr(eq + 1);
    std::size_t index = 0;
    while (!groups.empty()) {
      const auto bar = groups.find('|');
      std::string_view g = groups.substr(0, bar);
      groups = bar == std::string_view::npos ? std::string_view{} : groups.substr(bar + 1);
      if (g.size() < 2 || g.front() != '{' || g.back() != '}') throw ParseError(where, "classes must be written {a,b,...}");
      g = g.substr(1, g.size() - 2);
      while (!g.empty()) {
        const auto comma = g.find(',');
        const std::string label(g.substr(0, comma));
        g = comma == std::string_view::npos ? std::string_view{} : g.substr(comma + 1);
        const std::size_t v = find_label(labels, label, where, "value of " + name);
        if (cls[v] != labels.size()) throw ParseError(where, "value '" + label + "' in two classes");
        cls[v] = index;
      }
      ++index;
    }
    for (std::size_t v = 0; v < cls.size(); ++v) {
      if (cls[v] == labels.size()) throw ParseError(where, "value '" + labels[v] + "' of " + name + " is in no class");
    }
  }
  for (std::size_t k = 0; k < design.size(); ++k) {
    if (!given[k]) throw ParseError(where, "no partition for output '" + design.outputs[k].name + "'");
  }
  try {
    check_metric(cm, design);
  } catch (const UsageError& e) {
    throw ParseError(where, e.what());
  }
  return cm;
}

}  // namespace selinf
