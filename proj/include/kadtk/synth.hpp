#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kadtk/embedding_set.hpp"
#include "kadtk/types.hpp"

namespace kadtk {

/// Seeded synthetic embedding generators: diagonal Gaussians and Gaussian
/// mixtures. Every oracle, study fixture and benchmark input comes from
/// here, so sampling is a pure function of (spec, n, seed).
struct MixtureComponent {
  double weight = 1.0;
  std::vector<double> mean;
  std::vector<double> scale;  // per-dimension standard deviations, >= 0
};

struct DistributionSpec {
  enum class Kind { gaussian, gaussian_mixture };

  Kind kind = Kind::gaussian;
  std::size_t dim = 0;
  std::vector<MixtureComponent> components;

  void validate() const;

  static DistributionSpec gaussian(std::vector<double> mean, std::vector<double> scale);

  /// Overall mean/variance of the mixture, per dimension.
  void population_moments(std::vector<double>& mean, std::vector<double>& var) const;
};

/// n i.i.d. draws; component chosen by weight, then independent per-dimension
/// Gaussian draws. Bit-identical output for identical (spec, n, seed): each
/// row consumes its own counter-based stream, keyed by the row index.
EmbeddingSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed,
                    std::string label = "synth");

/// Closed form of the squared Frechet distance between two diagonal
/// Gaussians: sum_k (mu_x,k - mu_y,k)^2 + (s_x,k - s_y,k)^2. Mixtures have
/// no closed form and are rejected.
double analytic_fad(const DistributionSpec& spec_x, const DistributionSpec& spec_y);

/// Parse the declarative key = value format (see the file-format notes in
/// the README): a header with kind/dim, then one [component] section per
/// mixture component.
DistributionSpec parse_distribution_spec(const std::string& text);
DistributionSpec load_distribution_spec(const std::filesystem::path& path);

}  // namespace kadtk
