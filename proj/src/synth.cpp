#include "kadtk/synth.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kadtk/rng.hpp"

namespace kadtk {

void DistributionSpec::validate() const {
  if (dim < 1) throw InputError("distribution spec needs dim >= 1");
  if (components.empty()) throw InputError("distribution spec has no components");
  if (kind == Kind::gaussian && components.size() != 1) {
    throw InputError("kind = gaussian must have exactly one component (got " +
                     std::to_string(components.size()) + ")");
  }
  double wsum = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw InputError("component weights must be positive");
    if (c.mean.size() != dim || c.scale.size() != dim) {
      throw InputError("component mean/scale length must equal dim = " +
                       std::to_string(dim));
    }
    for (double s : c.scale) {
      if (!(s >= 0.0)) throw InputError("component scales must be >= 0");
    }
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw InputError("component weights must sum to 1 (got " + std::to_string(wsum) + ")");
  }
}

DistributionSpec DistributionSpec::gaussian(std::vector<double> mean,
                                            std::vector<double> scale) {
  DistributionSpec spec;
  spec.kind = Kind::gaussian;
  spec.dim = mean.size();
  spec.components.push_back({1.0, std::move(mean), std::move(scale)});
  spec.validate();
  return spec;
}

void DistributionSpec::population_moments(std::vector<double>& mean,
                                          std::vector<double>& var) const {
  validate();
  mean.assign(dim, 0.0);
  var.assign(dim, 0.0);
  for (const auto& c : components) {
    for (std::size_t k = 0; k < dim; ++k) mean[k] += c.weight * c.mean[k];
  }
  for (const auto& c : components) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double dm = c.mean[k] - mean[k];
      var[k] += c.weight * (c.scale[k] * c.scale[k] + dm * dm);
    }
  }
}

EmbeddingSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed,
                    std::string label) {
  spec.validate();
  if (n < 1) throw InputError("sample count must be >= 1");

  const std::size_t d = spec.dim;
  std::vector<double> data(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, {hash_tag("synth.sample"), i});
    std::size_t comp = 0;
    if (spec.components.size() > 1) {
      const double u = rng.next_uniform();
      double cum = 0.0;
      for (std::size_t c = 0; c < spec.components.size(); ++c) {
        cum += spec.components[c].weight;
        if (u < cum || c + 1 == spec.components.size()) {
          comp = c;
          break;
        }
      }
    }
    const auto& c = spec.components[comp];
    for (std::size_t k = 0; k < d; ++k) {
      data[i * d + k] = c.mean[k] + c.scale[k] * rng.next_normal();
    }
  }

  std::ostringstream source;
  source << "synth(kind=" << (spec.kind == DistributionSpec::Kind::gaussian
                                  ? "gaussian"
                                  : "gaussian_mixture")
         << " dim=" << d << " n=" << n << " seed=" << seed << ")";
  return EmbeddingSet(std::move(data), n, d, std::move(label), source.str());
}

double analytic_fad(const DistributionSpec& spec_x, const DistributionSpec& spec_y) {
  spec_x.validate();
  spec_y.validate();
  if (spec_x.kind != DistributionSpec::Kind::gaussian ||
      spec_y.kind != DistributionSpec::Kind::gaussian) {
    throw InputError("analytic_fad is defined for diagonal Gaussians only; "
                     "mixtures have no closed form");
  }
  if (spec_x.dim != spec_y.dim) {
    throw InputError("analytic_fad dimension mismatch: " + std::to_string(spec_x.dim) +
                     " vs " + std::to_string(spec_y.dim));
  }
  const auto& cx = spec_x.components[0];
  const auto& cy = spec_y.components[0];
  double total = 0.0;
  for (std::size_t k = 0; k < spec_x.dim; ++k) {
    const double dm = cx.mean[k] - cy.mean[k];
    const double ds = cx.scale[k] - cy.scale[k];
    total += dm * dm + ds * ds;
  }
  return total;
}

namespace {

std::vector<double> parse_number_list(const std::string& text, std::size_t line_no) {
  std::vector<double> out;
  std::istringstream iss(text);
  std::string tok;
  while (iss >> tok) {
    // allow comma-separated too
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError("line " + std::to_string(line_no) + ": cannot parse number \"" +
                       tok + "\"");
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

DistributionSpec parse_distribution_spec(const std::string& text) {
  DistributionSpec spec;
  spec.kind = DistributionSpec::Kind::gaussian;
  bool kind_seen = false;
  bool in_component = false;
  std::istringstream iss(text);
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(iss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line == "[component]") {
      spec.components.emplace_back();
      in_component = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("line " + std::to_string(line_no) +
                       ": expected key = value or [component], got \"" + line + "\"");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (!in_component) {
      if (key == "kind") {
        if (value == "gaussian") {
          spec.kind = DistributionSpec::Kind::gaussian;
        } else if (value == "gaussian_mixture") {
          spec.kind = DistributionSpec::Kind::gaussian_mixture;
        } else {
          throw InputError("line " + std::to_string(line_no) + ": unknown kind \"" +
                           value + "\"");
        }
        kind_seen = true;
      } else if (key == "dim") {
        spec.dim = static_cast<std::size_t>(std::stoul(value));
      } else {
        throw InputError("line " + std::to_string(line_no) + ": unknown header key \"" +
                         key + "\"");
      }
    } else {
      auto& comp = spec.components.back();
      if (key == "weight") {
        comp.weight = parse_number_list(value, line_no).at(0);
      } else if (key == "mean") {
        comp.mean = parse_number_list(value, line_no);
      } else if (key == "scale") {
        comp.scale = parse_number_list(value, line_no);
      } else {
        throw InputError("line " + std::to_string(line_no) + ": unknown component key \"" +
                         key + "\"");
      }
    }
  }
  if (!kind_seen && spec.components.size() > 1) {
    spec.kind = DistributionSpec::Kind::gaussian_mixture;
  }
  spec.validate();
  return spec;
}

DistributionSpec load_distribution_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open distribution spec: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_distribution_spec(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace kadtk
