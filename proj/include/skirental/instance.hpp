#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skirental/days.hpp"
#include "skirental/format.hpp"

namespace skirental {

/// One rental contract: covers `duration` consecutive days for `cost`.
struct RentalOption {
  Days duration{1};
  double cost = 1.0;
};

/// The option set of a ski-rental instance.
///
/// `scale` is the factor that has been applied to the original costs, so a
/// reported cost c maps back to original units as c / scale.
struct RentalInstance {
  std::vector<RentalOption> options;
  double scale = 1.0;
};

inline RentalInstance validate(RentalInstance instance) {
  if (instance.options.empty()) throw std::invalid_argument("instance has no rental options");
  for (std::size_t i = 0; i < instance.options.size(); ++i) {
    const auto& opt = instance.options[i];
    if (opt.duration == Days{0})
      throw std::invalid_argument("option " + std::to_string(i + 1) + " has zero duration");
    if (!(opt.cost > 0.0) || !std::isfinite(opt.cost))
      throw std::invalid_argument("option " + std::to_string(i + 1) + " has nonpositive cost");
  }
  if (!(instance.scale > 0.0) || !std::isfinite(instance.scale))
    throw std::invalid_argument("instance scale must be positive");
  return instance;
}

/// Multiplies every cost by `factor`; optimum costs scale by the same factor.
inline RentalInstance rescale(const RentalInstance& instance, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("rescale factor must be positive");
  RentalInstance out = instance;
  for (auto& opt : out.options) opt.cost *= factor;
  out.scale *= factor;
  return out;
}

/// The classic two-option instance: rent for one day at 1, or buy at `buy_cost`.
inline RentalInstance rent_or_buy(double buy_cost) {
  return validate(RentalInstance{{{Days{1}, 1.0}, {Days::infinite(), buy_cost}}, 1.0});
}

// Text format: first non-comment line holds n, then n lines "<d> <c>" where d
// is a positive integer or "inf". '#' starts a comment.
inline RentalInstance parse_instance(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw std::invalid_argument("instance file is empty");

  std::istringstream header(lines.front());
  long long n = -1;
  std::string extra;
  if (!(header >> n) || (header >> extra) || n < 0)
    throw std::invalid_argument("instance header must be a nonnegative option count");
  if (static_cast<std::size_t>(n) != lines.size() - 1)
    throw std::invalid_argument("instance declares " + std::to_string(n) + " options but lists " +
                                std::to_string(lines.size() - 1));

  RentalInstance instance;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string d_text, c_text;
    if (!(row >> d_text >> c_text) || (row >> extra))
      throw std::invalid_argument("malformed option line: '" + lines[i] + "'");
    RentalOption opt;
    if (d_text == "inf") {
      opt.duration = Days::infinite();
    } else {
      if (d_text.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad duration '" + d_text + "'");
      opt.duration = Days{std::stoull(d_text)};
    }
    auto cost = parse_number(c_text);
    if (!cost) throw std::invalid_argument("bad cost '" + c_text + "'");
    opt.cost = *cost;
    instance.options.push_back(opt);
  }
  return validate(std::move(instance));
}

inline std::string format_instance(const RentalInstance& instance) {
  std::string out = std::to_string(instance.options.size()) + "\n";
  for (const auto& opt : instance.options)
    out += opt.duration.to_string() + " " + format_number(opt.cost) + "\n";
  return out;
}

}  // namespace skirental
