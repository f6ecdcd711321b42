#ifndef PR_CONFIG_HPP
#define PR_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pr/solvers.hpp"
#include "pr/types.hpp"
#include "pr/vae.hpp"

namespace pr {

/// Flat "key = value" text with dotted sections, '#' comments, insertion
/// order preserved on save. The config and manifest file format.
class KvFile {
public:
    KvFile() = default;

    static KvFile parse_file(const std::string& path);
    static KvFile parse_string(const std::string& text);
    void save(const std::string& path) const;
    std::string to_string() const;

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get(const std::string& key) const;  // ConfigError when missing
    std::string get_or(const std::string& key, const std::string& fallback) const;
    long get_long(const std::string& key, long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

enum class MeasurementKind { Fourier, GaussianReal, GaussianComplex };
enum class MethodKind { Er, Hio, Dpr, Prilo };
enum class InitKind { Random, Mii };

struct ExperimentConfig {
    // dataset
    std::string dataset_images;
    std::string dataset_labels;
    std::string dataset_format = "idx";  // idx | pgm-dir
    Shape2D pgm_shape;                   // pgm-dir only

    // measurement
    MeasurementKind measurement = MeasurementKind::Fourier;
    Index measurement_m = 0;  // gaussian kinds only

    // method
    MethodKind method = MethodKind::Dpr;
    long er_iters = 1000;
    long hio_iters = 1000;
    double hio_beta = 0.9;
    std::string generator_weights;
    long dpr_steps = 1000;
    double dpr_step_size = 0.1;
    double dpr_radius = std::numeric_limits<double>::infinity();
    PriloConfig prilo;

    // initialization
    InitKind init = InitKind::Random;
    Index mii_candidates = 5000;

    int restarts = 1;
    Seed seed{1};
    std::string output_dir = "out";
    Index limit = 0;  // 0 = whole dataset
    bool trace = false;
    std::optional<bool> register_metrics;  // unset = on for Fourier, off for Gaussian
    int threads = 0;                       // 0 = hardware concurrency

    // training
    VaeSpec vae;

    bool registration_enabled() const {
        return register_metrics.value_or(measurement == MeasurementKind::Fourier);
    }

    static ExperimentConfig from_kv(const KvFile& kv);
    /// Fully resolved key set; from_kv(to_kv(c)) == c.
    KvFile to_kv() const;

    /// Existence checks for every referenced file (dataset, weights).
    void check_paths(bool need_dataset, bool need_weights) const;
};

std::string measurement_kind_name(MeasurementKind k);
std::string method_kind_name(MethodKind k);
std::string init_kind_name(InitKind k);

/// Round-trip exact double formatting ("%.17g") used in CSV and manifests.
std::string format_double(double v);

extern const char* const kToolVersion;

}  // namespace pr

#endif
