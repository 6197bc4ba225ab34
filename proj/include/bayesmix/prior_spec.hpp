#pragma once

// Prior-spec documents: one component per line,
//
//   <weight>, <kind> <params...>
//
// with kinds `point <loc>`, `uniform <lo> <hi>`, `beta <alpha> <beta>`,
// `tabulated <path>` and `log-singular`. Weights may be decimals or
// fractions such as 11/12. Commas and whitespace both separate fields;
// `#` starts a comment. Tabulated files hold `<theta> <density>` rows and
// their paths resolve relative to the spec file.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bayesmix/error.hpp"
#include "bayesmix/model.hpp"

namespace bayesmix {

namespace detail {

inline std::vector<std::string> spec_tokens(std::string line) {
  if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
  for (char& c : line) {
    if (c == ',' || c == '\t' || c == '\r') c = ' ';
  }
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

inline double spec_number(const std::string& tok, const std::string& source, std::size_t line,
                          const std::string& field) {
  double v = 0.0;
  if (auto slash = tok.find('/'); slash != std::string::npos) {
    double num = 0.0;
    double den = 0.0;
    if (parse_double(std::string_view(tok).substr(0, slash), num) &&
        parse_double(std::string_view(tok).substr(slash + 1), den) && den != 0.0) {
      return num / den;
    }
  } else if (parse_double(tok, v)) {
    return v;
  }
  throw SpecParseError(source, line, field + ": not a number: '" + tok + "'");
}

}  // namespace detail

/// Reads `<theta> <density>` rows.
inline ContinuousPrior load_tabulated_density(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError(path.string(), 0, "cannot open tabulated density file");
  std::vector<double> grid;
  std::vector<double> density;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const auto toks = detail::spec_tokens(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) throw SpecParseError(path.string(), no, "expected '<theta> <density>'");
    grid.push_back(detail::spec_number(toks[0], path.string(), no, "theta"));
    density.push_back(detail::spec_number(toks[1], path.string(), no, "density"));
  }
  try {
    return ContinuousPrior::tabulated(std::move(grid), std::move(density));
  } catch (const DomainError& e) {
    throw SpecParseError(path.string(), 0, e.what());
  }
}

/// Parses `<kind> <params...>` tokens into a component law.
inline ComponentLaw parse_component_law(const std::vector<std::string>& toks, std::size_t first,
                                        const std::filesystem::path& base_dir,
                                        const std::string& source, std::size_t line) {
  if (first >= toks.size()) throw SpecParseError(source, line, "kind: missing");
  const std::string& kind = toks[first];
  const std::size_t nparams = toks.size() - first - 1;
  auto expect = [&](std::size_t n, const char* usage) {
    if (nparams != n) throw SpecParseError(source, line, std::string("expected '") + usage + "'");
  };
  auto num = [&](std::size_t i, const char* field) {
    return detail::spec_number(toks[first + 1 + i], source, line, field);
  };
  try {
    if (kind == "point") {
      expect(1, "point <location>");
      const double loc = num(0, "location");
      if (!(loc >= 0.0 && loc <= 1.0)) {
        throw SpecParseError(source, line, "location: must lie in [0,1]");
      }
      return PointMass{loc};
    }
    if (kind == "uniform") {
      expect(2, "uniform <lo> <hi>");
      return ContinuousPrior::uniform(num(0, "lo"), num(1, "hi"));
    }
    if (kind == "beta") {
      expect(2, "beta <alpha> <beta>");
      return ContinuousPrior::beta(num(0, "alpha"), num(1, "beta"));
    }
    if (kind == "tabulated") {
      expect(1, "tabulated <path>");
      std::filesystem::path p(toks[first + 1]);
      if (p.is_relative()) p = base_dir / p;
      return load_tabulated_density(p);
    }
    if (kind == "log-singular") {
      expect(0, "log-singular");
      return ContinuousPrior::log_singular_at_zero();
    }
  } catch (const DomainError& e) {
    throw SpecParseError(source, line, e.what());
  }
  throw SpecParseError(source, line, "kind: unknown '" + kind + "'");
}

/// One continuous law written inline, e.g. "uniform 0 1" or "beta 2 2".
inline ContinuousPrior parse_continuous_law(const std::string& text,
                                            const std::filesystem::path& base_dir = ".") {
  const auto toks = detail::spec_tokens(text);
  auto law = parse_component_law(toks, 0, base_dir, "slab", 1);
  if (!std::holds_alternative<ContinuousPrior>(law)) {
    throw SpecParseError("slab", 1, "kind: a continuous law is required here");
  }
  return std::get<ContinuousPrior>(std::move(law));
}

inline MixturePrior parse_prior_spec(std::istream& in, const std::string& source,
                                     const std::filesystem::path& base_dir) {
  std::vector<PriorComponent> components;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const auto toks = detail::spec_tokens(line);
    if (toks.empty()) continue;
    const double weight = detail::spec_number(toks[0], source, no, "weight");
    components.push_back({weight, parse_component_law(toks, 1, base_dir, source, no)});
  }
  if (components.empty()) throw SpecParseError(source, 0, "no components");
  try {
    return MixturePrior(std::move(components));
  } catch (const DomainError& e) {
    throw SpecParseError(source, 0, e.what());
  }
}

inline MixturePrior parse_prior_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError(path.string(), 0, "cannot open prior-spec file");
  return parse_prior_spec(in, path.string(), path.parent_path());
}

}  // namespace bayesmix
