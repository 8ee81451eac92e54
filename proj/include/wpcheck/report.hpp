#pragma once

#include "wpcheck/value.hpp"

#include <chrono>
#include <json.hpp>

namespace wpcheck {

struct Counterexample {
  std::size_t index = 0;  // enumeration index, for deterministic ordering
  std::string params;
  std::string input;
  bool wp_verdict = false;
  bool post_verdict = false;
};

struct CheckReport {
  std::string mode;
  std::size_t inputs_checked = 0;
  std::size_t params_checked = 0;
  std::vector<Counterexample> counterexamples;
  std::chrono::milliseconds elapsed{0};

  bool pass() const { return counterexamples.empty(); }
  const char* verdict() const { return pass() ? "pass" : "fail"; }
};

inline std::string report_to_text(const CheckReport& r, std::size_t max_cex = 10) {
  std::ostringstream os;
  os << "mode: " << r.mode << "\n"
     << "verdict: " << r.verdict() << "\n"
     << "params checked: " << r.params_checked << "\n"
     << "inputs checked: " << r.inputs_checked << "\n"
     << "cases: " << r.params_checked * r.inputs_checked << "\n"
     << "elapsed: " << r.elapsed.count() << " ms\n";
  if (!r.counterexamples.empty()) {
    os << "counterexamples (" << r.counterexamples.size() << "):\n";
    for (std::size_t i = 0; i < r.counterexamples.size() && i < max_cex; ++i) {
      const auto& c = r.counterexamples[i];
      os << "  params=" << (c.params.empty() ? "-" : c.params) << " input=" << c.input
         << " wp=" << (c.wp_verdict ? "true" : "false") << " post=" << (c.post_verdict ? "true" : "false")
         << "\n";
    }
    if (r.counterexamples.size() > max_cex)
      os << "  … " << (r.counterexamples.size() - max_cex) << " more\n";
  }
  return os.str();
}

inline nlohmann::json report_to_json(const CheckReport& r) {
  nlohmann::json cexs = nlohmann::json::array();
  for (const auto& c : r.counterexamples)
    cexs.push_back({{"params", c.params},
                    {"input", c.input},
                    {"wp_verdict", c.wp_verdict},
                    {"post_verdict", c.post_verdict}});
  return {{"mode", r.mode},
          {"verdict", r.verdict()},
          {"inputs_checked", r.inputs_checked},
          {"params_checked", r.params_checked},
          {"counterexamples", cexs},
          {"elapsed_ms", r.elapsed.count()}};
}

}  // namespace wpcheck
