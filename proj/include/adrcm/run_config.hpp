#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adrcm/error.hpp"
#include "adrcm/io.hpp"
#include "adrcm/model.hpp"
#include "adrcm/trees.hpp"

namespace adrcm {

enum class Mode { kSample, kCliques, kTrees, kClt, kSigma, kMoments, kBlocks };
enum class StatisticKind { kCliques, kTree };

inline constexpr std::string_view kModeNames[] = {"sample", "cliques", "trees", "clt", "sigma", "moments", "blocks"};

inline std::string_view mode_name(Mode m) { return kModeNames[static_cast<int>(m)]; }

inline std::optional<Mode> parse_mode(std::string_view s) {
  for (int i = 0; i < 7; ++i) {
    if (kModeNames[i] == s) return static_cast<Mode>(i);
  }
  return std::nullopt;
}

// Validated experiment configuration. Relative file paths resolve against the
// working directory.
struct RunConfig {
  ModelParams model{0.3, 1.0, 1000.0};
  Mode mode = Mode::kCliques;
  StatisticKind statistic = StatisticKind::kCliques;
  std::vector<int> k_list{3};
  std::string tree;       // named tree: edge, wedge, path3, star3
  std::string tree_file;  // or a tree spec file
  std::size_t replicates = 1000;
  std::vector<double> n_list;
  std::uint64_t seed = 1;
  std::size_t samples = 20000;  // Palm samples for sigma and moments
  std::vector<double> u_list{0.3, 0.2, 0.1, 0.05, 0.02, 0.01};
  std::optional<double> u_floor;  // unset: chosen from the model (sigma mode)
  double power = 2.0;
  std::size_t max_lag = 10;
  std::size_t projections = 8;
  bool override_regime = false;
  std::string output_directory = "out";
  bool write_csv = true;
  bool write_json = true;

  // Loaded from `tree` or `tree_file` during validation; not part of the rendered text.
  std::optional<DirectedTreeSpec> tree_spec;

  bool operator==(const RunConfig& o) const {
    return model == o.model && mode == o.mode && statistic == o.statistic && k_list == o.k_list &&
           tree == o.tree && tree_file == o.tree_file && replicates == o.replicates && n_list == o.n_list &&
           seed == o.seed && samples == o.samples && u_list == o.u_list && u_floor == o.u_floor &&
           power == o.power && max_lag == o.max_lag && projections == o.projections &&
           override_regime == o.override_regime && output_directory == o.output_directory &&
           write_csv == o.write_csv && write_json == o.write_json;
  }
};

namespace detail {

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct KeyInfo {
  std::string_view section;
  std::string_view key;
};

inline constexpr KeyInfo kKeys[] = {
    {"model", "gamma"},         {"model", "beta"},          {"model", "n"},
    {"experiment", "mode"},     {"experiment", "statistic"}, {"experiment", "k_list"},
    {"experiment", "tree"},     {"experiment", "tree_file"}, {"experiment", "replicates"},
    {"experiment", "n_list"},   {"experiment", "seed"},      {"experiment", "samples"},
    {"experiment", "u_list"},   {"experiment", "u_floor"},   {"experiment", "power"},
    {"experiment", "max_lag"},  {"experiment", "projections"}, {"experiment", "override_regime"},
    {"output", "directory"},    {"output", "formats"},
};

inline std::string suggestion(std::string_view section, std::string_view key) {
  std::string best;
  std::size_t best_d = 3;  // suggest only close matches
  for (const auto& k : kKeys) {
    if (k.section != section) continue;
    const auto d = edit_distance(key, k.key);
    if (d < best_d) {
      best_d = d;
      best = k.key;
    }
  }
  return best;
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto end = comma == std::string_view::npos ? v.size() : comma;
    out.push_back(trim(v.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc() && r.ptr == end && !s.empty();
}

inline bool parse_double(std::string_view s, double& out) {
  try {
    out = parse_real(s, "");
    return true;
  } catch (const FormatError&) {
    return false;
  }
}

inline bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "yes" || s == "1") {
    out = true;
    return true;
  }
  if (s == "false" || s == "no" || s == "0") {
    out = false;
    return true;
  }
  return false;
}

inline std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_shortest(v[i]);
  return s;
}

}  // namespace detail

inline DirectedTreeSpec named_tree(std::string_view name) {
  if (name == "edge") return trees::edge();
  if (name == "wedge") return trees::wedge();
  if (name == "path3") return trees::path3();
  if (name == "star3") return trees::star3();
  throw ParameterError("unknown tree '" + std::string(name) + "' (known: edge, wedge, path3, star3)");
}

// Cross-field checks. Appends problems to `problems` and loads the tree spec.
inline void validate_config(RunConfig& c, std::vector<std::string>& problems) {
  try {
    c.model.validate();
  } catch (const Error& e) {
    problems.emplace_back(e.what());
  }
  const bool wants_tree = c.statistic == StatisticKind::kTree;
  if (c.mode == Mode::kTrees && !wants_tree) problems.emplace_back("mode 'trees' requires statistic = tree");
  if (c.mode == Mode::kCliques && wants_tree) problems.emplace_back("mode 'cliques' requires statistic = cliques");
  if (c.mode == Mode::kBlocks && !wants_tree) problems.emplace_back("mode 'blocks' requires statistic = tree");
  if (c.mode == Mode::kSigma && wants_tree) problems.emplace_back("mode 'sigma' is defined for clique statistics only");
  if (!wants_tree) {
    if (c.k_list.empty()) problems.emplace_back("k_list must not be empty");
    for (int k : c.k_list) {
      if (k < 1) problems.emplace_back("k_list entries must be >= 1, got " + std::to_string(k));
    }
  }
  c.tree_spec.reset();
  if (wants_tree) {
    if (c.tree.empty() == c.tree_file.empty()) {
      problems.emplace_back("statistic = tree needs exactly one of 'tree' or 'tree_file'");
    } else {
      try {
        DirectedTreeSpec spec;
        if (!c.tree.empty()) {
          spec = named_tree(c.tree);
        } else {
          if (!std::filesystem::exists(c.tree_file)) throw Error("tree_file not found: " + c.tree_file);
          spec = parse_tree_spec(read_file(c.tree_file));
        }
        validate_tree(spec);
        c.tree_spec = spec;
      } catch (const Error& e) {
        problems.emplace_back(e.what());
      }
    }
  }
  const bool replicated = c.mode == Mode::kCliques || c.mode == Mode::kTrees || c.mode == Mode::kClt ||
                          c.mode == Mode::kBlocks;
  if (replicated && c.replicates < 2) problems.emplace_back("replicates must be >= 2");
  if (!c.n_list.empty() && c.n_list.size() < 2) problems.emplace_back("n_list needs at least 2 entries");
  for (double n : c.n_list) {
    if (!(n > 0.0)) problems.emplace_back("n_list entries must be positive");
  }
  if (!c.n_list.empty() && c.replicates < 200)
    problems.emplace_back("variance scaling over n_list needs replicates >= 200");
  if ((c.mode == Mode::kSigma || c.mode == Mode::kMoments) && c.samples < 2)
    problems.emplace_back("samples must be >= 2");
  if (c.u_floor && !(*c.u_floor > 0.0 && *c.u_floor < 1.0)) problems.emplace_back("u_floor must lie in (0,1) or be auto");
  if (c.mode == Mode::kMoments) {
    if (c.u_list.size() < 2) problems.emplace_back("u_list needs at least 2 marks");
    for (double u : c.u_list) {
      if (!(u > 0.0 && u <= 1.0)) problems.emplace_back("u_list entries must lie in (0,1]");
    }
  }
  if (c.mode == Mode::kBlocks && c.model.torus_length != std::floor(c.model.torus_length))
    problems.emplace_back("mode 'blocks' needs an integer torus length n");
  if (!c.write_csv && !c.write_json) problems.emplace_back("formats must name csv, json or both");

  // Normality is only asserted inside the proven CLT regimes.
  const double g = c.model.gamma;
  if ((c.mode == Mode::kClt || c.mode == Mode::kSigma) && !c.override_regime) {
    if (!wants_tree && !(g < 0.5)) {
      problems.emplace_back("gamma = " + format_shortest(g) +
                            " is outside the clique CLT regime gamma < 1/2; set override_regime = true to explore");
    } else if (wants_tree && c.tree_spec) {
      const auto leaves = validate_tree(*c.tree_spec).leaf_count();
      if (!(g < 1.0 / (2.0 * static_cast<double>(leaves)))) {
        problems.emplace_back("gamma = " + format_shortest(g) + " is outside the tree CLT regime gamma < 1/(2*" +
                              std::to_string(leaves) + "); set override_regime = true to explore");
      }
    }
  }
}

// Parses a `[section]` / `key = value` document, collecting every problem.
inline RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::vector<std::string> problems;
  std::string section;
  bool mode_seen = false;
  std::vector<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back(where + "malformed section header '" + line + "'");
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "model" && section != "experiment" && section != "output")
        problems.push_back(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) {
      problems.push_back(where + "key '" + key + "' outside any section");
      continue;
    }
    const std::string qualified = section + "." + key;
    if (std::find(seen.begin(), seen.end(), qualified) != seen.end()) {
      problems.push_back(where + "duplicate key '" + qualified + "'");
      continue;
    }
    seen.push_back(qualified);

    auto bad = [&](std::string_view type) {
      problems.push_back(where + "'" + qualified + "' expects " + std::string(type) + ", got '" + value + "'");
    };
    auto real = [&](double& dst) {
      if (!detail::parse_double(value, dst)) bad("a real number");
    };
    auto size = [&](std::size_t& dst) {
      if (!detail::parse_int(value, dst)) bad("a non-negative integer");
    };
    auto reals = [&](std::vector<double>& dst) {
      dst.clear();
      for (const auto& item : detail::split_list(value)) {
        double v = 0.0;
        if (!detail::parse_double(item, v)) {
          bad("a comma-separated list of reals");
          return;
        }
        dst.push_back(v);
      }
    };

    if (section == "model" && key == "gamma") {
      real(c.model.gamma);
    } else if (section == "model" && key == "beta") {
      real(c.model.beta);
    } else if (section == "model" && key == "n") {
      real(c.model.torus_length);
    } else if (section == "experiment" && key == "mode") {
      if (const auto m = parse_mode(value)) {
        c.mode = *m;
        mode_seen = true;
      } else {
        bad("one of sample|cliques|trees|clt|sigma|moments|blocks");
      }
    } else if (section == "experiment" && key == "statistic") {
      if (value == "cliques") {
        c.statistic = StatisticKind::kCliques;
      } else if (value == "tree") {
        c.statistic = StatisticKind::kTree;
      } else {
        bad("'cliques' or 'tree'");
      }
    } else if (section == "experiment" && key == "k_list") {
      c.k_list.clear();
      for (const auto& item : detail::split_list(value)) {
        int k = 0;
        if (!detail::parse_int(item, k)) {
          bad("a comma-separated list of integers");
          break;
        }
        c.k_list.push_back(k);
      }
    } else if (section == "experiment" && key == "tree") {
      c.tree = value;
    } else if (section == "experiment" && key == "tree_file") {
      c.tree_file = value;
    } else if (section == "experiment" && key == "replicates") {
      size(c.replicates);
    } else if (section == "experiment" && key == "n_list") {
      reals(c.n_list);
    } else if (section == "experiment" && key == "seed") {
      if (!detail::parse_int(value, c.seed)) bad("an unsigned 64-bit integer");
    } else if (section == "experiment" && key == "samples") {
      size(c.samples);
    } else if (section == "experiment" && key == "u_list") {
      reals(c.u_list);
    } else if (section == "experiment" && key == "u_floor") {
      if (value == "auto") {
        c.u_floor.reset();
      } else {
        double f = 0.0;
        real(f);
        c.u_floor = f;
      }
    } else if (section == "experiment" && key == "power") {
      real(c.power);
    } else if (section == "experiment" && key == "max_lag") {
      size(c.max_lag);
    } else if (section == "experiment" && key == "projections") {
      size(c.projections);
    } else if (section == "experiment" && key == "override_regime") {
      if (!detail::parse_bool(value, c.override_regime)) bad("true or false");
    } else if (section == "output" && key == "directory") {
      c.output_directory = value;
    } else if (section == "output" && key == "formats") {
      c.write_csv = c.write_json = false;
      for (const auto& f : detail::split_list(value)) {
        if (f == "csv") {
          c.write_csv = true;
        } else if (f == "json") {
          c.write_json = true;
        } else {
          bad("a list drawn from csv, json");
        }
      }
    } else {
      std::string msg = where + "unknown key '" + qualified + "'";
      const auto hint = detail::suggestion(section, key);
      if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
      problems.push_back(msg);
    }
  }
  if (!mode_seen) problems.emplace_back("missing required key 'experiment.mode'");
  // The statistic defaults to the one the mode implies.
  if (std::find(seen.begin(), seen.end(), "experiment.statistic") == seen.end()) {
    c.statistic = (c.mode == Mode::kTrees || c.mode == Mode::kBlocks) ? StatisticKind::kTree
                                                                        : StatisticKind::kCliques;
  }
  validate_config(c, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

// Canonical text form; parse_config(render_config(c)) == c.
inline std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[model]\n";
  out << "gamma = " << format_shortest(c.model.gamma) << '\n';
  out << "beta = " << format_shortest(c.model.beta) << '\n';
  out << "n = " << format_shortest(c.model.torus_length) << '\n';
  out << "\n[experiment]\n";
  out << "mode = " << mode_name(c.mode) << '\n';
  out << "statistic = " << (c.statistic == StatisticKind::kTree ? "tree" : "cliques") << '\n';
  out << "k_list = ";
  for (std::size_t i = 0; i < c.k_list.size(); ++i) out << (i ? ", " : "") << c.k_list[i];
  out << '\n';
  if (!c.tree.empty()) out << "tree = " << c.tree << '\n';
  if (!c.tree_file.empty()) out << "tree_file = " << c.tree_file << '\n';
  out << "replicates = " << c.replicates << '\n';
  out << "n_list = " << detail::join_reals(c.n_list) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "samples = " << c.samples << '\n';
  out << "u_list = " << detail::join_reals(c.u_list) << '\n';
  out << "u_floor = " << (c.u_floor ? format_shortest(*c.u_floor) : std::string("auto")) << '\n';
  out << "power = " << format_shortest(c.power) << '\n';
  out << "max_lag = " << c.max_lag << '\n';
  out << "projections = " << c.projections << '\n';
  out << "override_regime = " << (c.override_regime ? "true" : "false") << '\n';
  out << "\n[output]\n";
  out << "directory = " << c.output_directory << '\n';
  out << "formats = ";
  if (c.write_csv) out << "csv" << (c.write_json ? ", " : "");
  if (c.write_json) out << "json";
  out << '\n';
  return out.str();
}

// Returns `text` with `key` in `[section]` set to `value`, replacing any
// existing assignment. The section is appended when absent.
inline std::string set_config_value(std::string_view text, std::string_view section, std::string_view key,
                                    std::string_view value) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> lines;
  std::string raw, current;
  std::size_t insert_at = std::string::npos;
  while (std::getline(in, raw)) {
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (!line.empty() && line.front() == '[' && line.back() == ']') {
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      lines.push_back(raw);
      if (current == section && insert_at == std::string::npos) insert_at = lines.size();
      continue;
    }
    const auto eq = line.find('=');
    if (current == section && eq != std::string::npos && trim(std::string_view(line).substr(0, eq)) == key) continue;
    lines.push_back(raw);
  }
  const std::string assignment = std::string(key) + " = " + std::string(value);
  if (insert_at == std::string::npos) {
    lines.push_back("[" + std::string(section) + "]");
    lines.push_back(assignment);
  } else {
    lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(insert_at), assignment);
  }
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  return out;
}

// Value of `key` in `[section]`, if assigned.
inline std::optional<std::string> get_config_value(std::string_view text, std::string_view section,
                                                   std::string_view key) {
  std::istringstream in{std::string(text)};
  std::string raw, current;
  while (std::getline(in, raw)) {
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (!line.empty() && line.front() == '[' && line.back() == ']') {
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (current == section && eq != std::string::npos && trim(std::string_view(line).substr(0, eq)) == key)
      return trim(std::string_view(line).substr(eq + 1));
  }
  return std::nullopt;
}

}  // namespace adrcm
