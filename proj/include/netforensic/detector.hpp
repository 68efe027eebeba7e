#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netforensic/flow_model.hpp"

namespace nf {

/// Gaussian kernel bandwidth. Always positive and finite.
class KernelParams {
public:
    explicit KernelParams(double sigma);
    double sigma() const noexcept { return sigma_; }

    friend bool operator==(const KernelParams&, const KernelParams&) = default;

private:
    double sigma_;
};

/// Normal density with standard deviation `sigma` evaluated at x.
double gaussian_kernel(double x, double sigma);

/// Sample correntropy: mean of the kernel over element-wise differences.
double correntropy(std::span<const double> a, std::span<const double> b, const KernelParams& kernel);

struct BandwidthPolicy {
    enum class Kind {
        fixed,
        /// Silverman's rule 1.06 * s * m^(-1/5), s = sd of the pooled scaled
        /// deviations from the reference, m = number of features (the number
        /// of kernel terms averaged per correntropy value).
        automatic,
        /// As automatic but m = size of the deviation pool. Shrinks the kernel
        /// with the training size; kept for sensitivity runs.
        silverman_pooled,
    };
    Kind kind = Kind::automatic;
    double sigma = 0.0;  // used when kind == fixed

    static BandwidthPolicy fixed_sigma(double s) { return {Kind::fixed, s}; }
    static BandwidthPolicy automatic_rule() { return {Kind::automatic, 0.0}; }
};

inline constexpr double kMinBandwidth = 1e-6;
inline constexpr double kDefaultMultiplier = 2.0;

struct NormalBaseline {
    std::vector<std::string> feature_names;
    std::vector<double> scale_min;
    std::vector<double> scale_max;
    std::vector<double> reference;  // mean scaled normal vector
    KernelParams kernel{1.0};
    double mu_corpy = 0.0;
    double sd_corpy = 0.0;
    std::uint64_t n_train = 0;
    std::string training_checksum;  // set by the experiment runner; empty otherwise
    std::vector<std::string> warnings;

    std::size_t dimension() const noexcept { return feature_names.size(); }
    /// Min-max scales raw values with the training ranges, clamped to [0, 1].
    /// Constant training features map to 0.
    std::vector<double> scale(std::span<const double> raw) const;

    friend bool operator==(const NormalBaseline&, const NormalBaseline&) = default;
};

/// Fits the normal profile on records labeled normal (unlabeled records are
/// taken as normal; attack-labeled ones are rejected).
NormalBaseline fit_baseline(const Dataset& normal_records, const std::vector<std::string>& feature_names,
                            const BandwidthPolicy& bandwidth = {});

struct RiskScore {
    double corpy = 0.0;
    double deviation = 0.0;   // mu_corpy - corpy
    double risk_level = 0.0;  // in [0, 1]; 0.5 at deviation == 2 * sd_corpy
    bool attack = false;

    friend bool operator==(const RiskScore&, const RiskScore&) = default;
};

/// Attack decision for a deviation at the given threshold multiplier.
bool is_attack(double deviation, double sd_corpy, double multiplier);

/// Scores an already-extracted raw feature vector in baseline feature order.
RiskScore score_vector(std::span<const double> raw, const NormalBaseline& baseline,
                       double multiplier = kDefaultMultiplier);

/// Looks up the baseline features in `schema` and scores the record.
RiskScore score(const FlowRecord& record, const FeatureSchema& schema, const NormalBaseline& baseline,
                double multiplier = kDefaultMultiplier);

struct ScoredFlow {
    FlowKey key;
    std::optional<int> binary_label;
    std::optional<std::string> class_label;
    RiskScore score;

    friend bool operator==(const ScoredFlow&, const ScoredFlow&) = default;
};

/// Scores every record; output order matches input order.
std::vector<ScoredFlow> score_batch(const Dataset& dataset, const NormalBaseline& baseline,
                                    double threshold_multiplier = kDefaultMultiplier, unsigned workers = 1);

// Versioned text form, one `key value...` line per field.
void save_baseline(const NormalBaseline& baseline, const std::filesystem::path& path);
NormalBaseline load_baseline(const std::filesystem::path& path);
std::string baseline_to_text(const NormalBaseline& baseline);
NormalBaseline baseline_from_text(const std::string& text);

}  // namespace nf
