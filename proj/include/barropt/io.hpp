#pragma once

// JSON schemas and CSV output.
//
// model:  {"mu": f, "sigma": f, "q": f,
//          "jumps": {"lambda": f, "phases": [{"p": f, "alpha": f}, ...]}}
//         with "jumps" optional
// reward: {"kind":"power","alpha":f} | {"kind":"exp","beta":f}
//       | {"kind":"rational","num":[...],"den":[...]}   (ascending degree)
//       | {"kind":"table","x":[...],"g":[...]}
//
// Floating point is serialized with 17 significant digits.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "barropt/errors.hpp"
#include "barropt/model.hpp"
#include "barropt/reward.hpp"

namespace barropt::io {

inline constexpr const char* kVersion = "0.1.0";

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

inline LevyModel model_from_json(const nlohmann::json& j) {
  try {
    std::optional<HyperExpJumps> jumps;
    if (j.contains("jumps") && !j["jumps"].is_null()) {
      HyperExpJumps hj;
      hj.lambda = j["jumps"].at("lambda").get<double>();
      for (const auto& ph : j["jumps"].at("phases"))
        hj.phases.push_back({ph.at("p").get<double>(), ph.at("alpha").get<double>()});
      jumps = std::move(hj);
    }
    return LevyModel(j.at("mu").get<double>(), j.at("sigma").get<double>(),
                     j.at("q").get<double>(), std::move(jumps));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model schema: ") + e.what());
  }
}

inline nlohmann::json model_to_json(const LevyModel& m) {
  nlohmann::json j{{"mu", m.mu()}, {"sigma", m.sigma()}, {"q", m.q()}};
  if (m.has_jumps()) {
    nlohmann::json phases = nlohmann::json::array();
    for (const auto& ph : m.jumps().phases)
      phases.push_back({{"p", ph.p}, {"alpha", ph.alpha}});
    j["jumps"] = {{"lambda", m.jumps().lambda}, {"phases", phases}};
  }
  return j;
}

inline RewardFunction reward_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power") return RewardFunction::power(j.at("alpha").get<double>());
    if (kind == "exp")
      return RewardFunction::exponential(j.at("beta").get<double>());
    if (kind == "rational")
      return RewardFunction::rational(j.at("num").get<std::vector<double>>(),
                                      j.at("den").get<std::vector<double>>());
    if (kind == "table")
      return RewardFunction::table(j.at("x").get<std::vector<double>>(),
                                   j.at("g").get<std::vector<double>>());
    throw ConfigError("unknown reward kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad reward schema: ") + e.what());
  }
}

inline nlohmann::json reward_to_json(const RewardFunction& r) {
  switch (r.kind()) {
    case RewardFunction::Kind::power:
      return {{"kind", "power"}, {"alpha", r.power_alpha()}};
    case RewardFunction::Kind::exponential:
      return {{"kind", "exp"}, {"beta", r.exp_beta()}};
    case RewardFunction::Kind::rational:
      return {{"kind", "rational"}, {"num", r.rational_num()}, {"den", r.rational_den()}};
    case RewardFunction::Kind::table:
      return {{"kind", "table"}, {"x", r.table_x()}, {"g", r.table_g()}};
  }
  throw std::logic_error("unreachable");
}

inline LevyModel load_model(const std::string& path) {
  return model_from_json(load_json_file(path));
}

inline RewardFunction load_reward(const std::string& path) {
  return reward_from_json(load_json_file(path));
}

// "a,b,c" -> {a, b, c}
inline std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw ConfigError("bad number in list: " + tok);
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

struct GridRange {
  double start, stop, step;
};

// "start:stop:step"
inline GridRange parse_grid(const std::string& s) {
  GridRange g;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &g.start, &g.stop, &g.step) != 3 ||
      !(g.step > 0.0) || !(g.stop >= g.start))
    throw ConfigError("bad grid spec (want start:stop:step): " + s);
  return g;
}

inline std::vector<double> grid_points(const GridRange& g) {
  std::vector<double> xs;
  const long n = long((g.stop - g.start) / g.step + 1e-9) + 1;
  for (long i = 0; i < n; ++i) xs.push_back(g.start + double(i) * g.step);
  return xs;
}

// CSV with a config-echo comment header
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& command,
            const nlohmann::json& config, const std::vector<std::string>& cols)
      : out_(path) {
    if (!out_) throw ConfigError("cannot write file: " + path);
    out_ << "# barropt " << kVersion << " " << command << "\n";
    out_ << "# config: " << config.dump() << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i)
      out_ << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  }

  void row(const std::vector<double>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i)
      out_ << fmt17(vs[i]) << (i + 1 < vs.size() ? "," : "\n");
  }

  void raw_row(const std::string& line) { out_ << line << "\n"; }

 private:
  std::ofstream out_;
};

// result JSON with version + config echo
inline nlohmann::json result_envelope(const std::string& command,
                                      const nlohmann::json& config) {
  return {{"tool", "barropt"},
          {"version", kVersion},
          {"command", command},
          {"config", config}};
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace barropt::io
