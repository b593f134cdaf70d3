#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tsord/dataset.hpp"
#include "tsord/feature_matrix.hpp"

namespace tsord {

enum class TransformVariant { rocket, minirocket, multirocket };

std::string_view to_string(TransformVariant v);
TransformVariant transform_variant_from_string(std::string_view s);

/// `num_kernels` drives rocket (two features per kernel). `num_features` is
/// the budget for minirocket/multirocket; 0 picks the variant default
/// (10,000 and 50,000). The fixed kernel set rounds the budget down to what
/// it can emit evenly: 84 * floor(budget/84) columns for minirocket,
/// 2 * 4 * 84 * floor(budget/(2*4*84)) for multirocket.
struct TransformConfig {
  TransformVariant variant = TransformVariant::minirocket;
  int num_kernels = 10000;
  int num_features = 0;
  std::uint64_t seed = 0;
  bool center_weights = true;  // rocket: mean-center the sampled weights

  int feature_budget() const;
};

/// One random convolutional kernel. `padding` is the zero count added to
/// each side; `channels` lists the input channels summed into the response
/// (empty means channel 0 only).
struct Kernel {
  std::vector<double> weights;
  int dilation = 1;
  int padding = 0;
  double bias = 0.0;
  std::vector<int> channels;

  int length() const { return static_cast<int>(weights.size()); }
  int span() const { return (length() - 1) * dilation + 1; }
};

/// Random kernels: length in {7, 9, 11}, weights Normal(0,1) (mean-centered
/// when requested), bias Uniform(-1,1), dilation floor(2^x) with
/// x ~ Uniform(0, log2((T-1)/(n-1))), padding applied with probability 1/2
/// at (n-1)*d/2 per side. Kernel k draws from a stream keyed by (seed, k).
std::vector<Kernel> generate_rocket_kernels(int series_length, int num_kernels, int num_channels,
                                            std::uint64_t seed, bool center_weights = true);

/// Sliding dot product over one channel honouring dilation and zero padding;
/// output length is T + 2*padding - (n-1)*d.
std::vector<double> convolve(std::span<const double> series, const Kernel& k);

// Pooling operators over a convolution output (all require non-empty input).
double ppv(std::span<const double> z);   // fraction of strictly positive values
double gmp(std::span<const double> z);   // max
double mpv(std::span<const double> z);   // mean of positive values, 0 when none
double mipv(std::span<const double> z);  // mean 0-based index of positives, -1 when none
double lspv(std::span<const double> z);  // longest run of positives, 0 when none

// ---------------------------------------------------------------- rocket

struct RocketTransform {
  int series_length = 0;
  int num_channels = 0;
  std::vector<Kernel> kernels;

  static RocketTransform fit(const OrdinalDataset& train, const TransformConfig& config);
  FeatureMatrix apply(const OrdinalDataset& ds) const;
};

// ------------------------------------------------- minirocket/multirocket

/// The 84 fixed kernels: every placement of three weights of value 2 among
/// nine positions, the remaining six taking value -1 (weights sum to zero).
const std::array<std::array<int, 3>, 84>& minirocket_kernel_positions();

/// Convolution schedule for one input representation: which dilations run,
/// how many bias quantiles each (kernel, dilation) slot gets, the per-slot
/// channel subsets for multivariate input, and the fitted biases (quantiles
/// of the convolution output of one training instance per slot, taken at
/// golden-ratio low-discrepancy positions). A slot is padded when
/// (dilation index + kernel index) is even, so padding alternates.
struct ConvPlan {
  int series_length = 0;  // length of this representation
  int num_channels = 0;
  bool first_difference = false;
  std::vector<int> dilations;
  std::vector<int> quantiles_per_dilation;        // per kernel at that dilation
  std::vector<std::vector<int>> channel_subsets;  // indexed dilation*84 + kernel; empty when C == 1
  std::vector<double> biases;                     // one per (dilation, kernel, quantile)

  int slots_per_kernel() const;
  int total_slots() const { return static_cast<int>(biases.size()); }

  static ConvPlan fit(const OrdinalDataset& train, bool first_difference, int features_per_kernel,
                      std::uint64_t seed, std::uint64_t stream_tag);
};

struct MiniRocketTransform {
  ConvPlan plan;

  static MiniRocketTransform fit(const OrdinalDataset& train, const TransformConfig& config);
  FeatureMatrix apply(const OrdinalDataset& ds) const;
};

struct MultiRocketTransform {
  ConvPlan base;  // raw series
  ConvPlan diff;  // first-order difference

  static MultiRocketTransform fit(const OrdinalDataset& train, const TransformConfig& config);
  FeatureMatrix apply(const OrdinalDataset& ds) const;
};

// Fit on train, apply to both.
std::pair<FeatureMatrix, FeatureMatrix> rocket_transform(const OrdinalDataset& train,
                                                         const OrdinalDataset& test,
                                                         const TransformConfig& config);
std::pair<FeatureMatrix, FeatureMatrix> minirocket_transform(const OrdinalDataset& train,
                                                             const OrdinalDataset& test,
                                                             const TransformConfig& config);
std::pair<FeatureMatrix, FeatureMatrix> multirocket_transform(const OrdinalDataset& train,
                                                              const OrdinalDataset& test,
                                                              const TransformConfig& config);
std::pair<FeatureMatrix, FeatureMatrix> apply_transform(const OrdinalDataset& train,
                                                        const OrdinalDataset& test,
                                                        const TransformConfig& config);

namespace detail {

/// First-order difference, length T-1.
std::vector<double> first_difference(std::span<const double> series);

/// Dilation ladder shared by minirocket/multirocket: integer dilations
/// log-spaced in [1, (L-1)/8] with the per-kernel quantile budget spread
/// across them (earlier dilations absorb the rounding remainder).
void plan_dilations(int series_length, int features_per_kernel, std::vector<int>& dilations,
                    std::vector<int>& quantiles_per_dilation);

/// Golden-ratio low-discrepancy point in (0, 1) for global quantile index g.
double quantile_position(int g);

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> sample, double position);

/// Shared per-(instance, dilation) scratch for the fixed 84-kernel set:
/// zero-padded channels (4*d per side) and the all-taps sum, from which any
/// kernel's convolution is three tap reads plus one add per position. Output
/// is in padded coordinates: length = representation length, kernel centered
/// on each position.
struct TapWorkspace {
  int length = 0;
  int dilation = 0;
  std::vector<std::vector<double>> padded;  // per channel, length + 8*d
  std::vector<std::vector<double>> alpha;   // per channel: -(sum of the 9 taps)
};

void build_taps(const TimeSeriesInstance& inst, bool first_difference_rep, int dilation,
                TapWorkspace& ws);
void kernel_convolution(const TapWorkspace& ws, int kernel, std::span<const int> channels,
                        std::vector<double>& z);

}  // namespace detail

}  // namespace tsord
