#include "pr/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pr {

const char* const kToolVersion = "phaseprior 1.0.0";

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

KvFile KvFile::parse_string(const std::string& text) {
    KvFile kv;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        kv.set(key, trim(t.substr(eq + 1)));
    }
    return kv;
}

KvFile KvFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

void KvFile::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write config file: " + path);
    out << to_string();
    if (!out) throw DataError("write failed: " + path);
}

std::string KvFile::to_string() const {
    std::string s;
    for (const auto& [k, v] : entries_) s += k + " = " + v + "\n";
    return s;
}

bool KvFile::has(const std::string& key) const { return index_.count(key) != 0; }

void KvFile::set(const std::string& key, const std::string& value) {
    auto it = index_.find(key);
    if (it == index_.end()) {
        index_[key] = entries_.size();
        entries_.emplace_back(key, value);
    } else {
        entries_[it->second].second = value;
    }
}

std::string KvFile::get(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) throw ConfigError("missing config key: " + key);
    return entries_[it->second].second;
}

std::string KvFile::get_or(const std::string& key, const std::string& fallback) const {
    auto it = index_.find(key);
    return it == index_.end() ? fallback : entries_[it->second].second;
}

long KvFile::get_long(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    try {
        return std::stol(get(key));
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + get(key));
    }
}

std::uint64_t KvFile::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    try {
        return std::stoull(get(key));
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an unsigned integer: " + get(key));
    }
}

double KvFile::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    if (v == "inf" || v == "+inf" || v == "infinity")
        return std::numeric_limits<double>::infinity();
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + v);
    }
}

bool KvFile::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + v);
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string measurement_kind_name(MeasurementKind k) {
    switch (k) {
        case MeasurementKind::Fourier: return "fourier";
        case MeasurementKind::GaussianReal: return "gaussian-real";
        case MeasurementKind::GaussianComplex: return "gaussian-complex";
    }
    return "?";
}

std::string method_kind_name(MethodKind k) {
    switch (k) {
        case MethodKind::Er: return "er";
        case MethodKind::Hio: return "hio";
        case MethodKind::Dpr: return "dpr";
        case MethodKind::Prilo: return "prilo";
    }
    return "?";
}

std::string init_kind_name(InitKind k) { return k == InitKind::Random ? "random" : "mii"; }

namespace {

MeasurementKind parse_measurement(const std::string& s) {
    if (s == "fourier") return MeasurementKind::Fourier;
    if (s == "gaussian-real") return MeasurementKind::GaussianReal;
    if (s == "gaussian-complex") return MeasurementKind::GaussianComplex;
    throw ConfigError("unknown measurement.kind: " + s);
}

MethodKind parse_method(const std::string& s) {
    if (s == "er") return MethodKind::Er;
    if (s == "hio") return MethodKind::Hio;
    if (s == "dpr") return MethodKind::Dpr;
    if (s == "prilo") return MethodKind::Prilo;
    throw ConfigError("unknown method.name: " + s);
}

InitKind parse_init(const std::string& s) {
    if (s == "random") return InitKind::Random;
    if (s == "mii") return InitKind::Mii;
    throw ConfigError("unknown init.kind: " + s);
}

std::vector<Index> parse_dims(const std::string& s) {
    std::vector<Index> dims;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        dims.push_back(std::stol(item));
    }
    if (dims.empty()) throw ConfigError("empty dimension list: " + s);
    return dims;
}

std::string dims_to_string(const std::vector<Index>& dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i)
        s += (i ? "," : "") + std::to_string(dims[i]);
    return s;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_kv(const KvFile& kv) {
    ExperimentConfig c;
    c.dataset_images = kv.get_or("dataset.images", "");
    c.dataset_labels = kv.get_or("dataset.labels", "");
    c.dataset_format = kv.get_or("dataset.format", "idx");
    if (c.dataset_format != "idx" && c.dataset_format != "pgm-dir")
        throw ConfigError("unknown dataset.format: " + c.dataset_format);
    if (c.dataset_format == "pgm-dir")
        c.pgm_shape = Shape2D(kv.get_long("dataset.height", 28), kv.get_long("dataset.width", 28));

    c.measurement = parse_measurement(kv.get_or("measurement.kind", "fourier"));
    c.measurement_m = kv.get_long("measurement.m", 0);
    if (c.measurement != MeasurementKind::Fourier && c.measurement_m < 1)
        throw ConfigError("measurement.m is required for gaussian measurement kinds");

    c.method = parse_method(kv.get_or("method.name", "dpr"));
    c.er_iters = kv.get_long("er.iters", 1000);
    c.hio_iters = kv.get_long("hio.iters", 1000);
    c.hio_beta = kv.get_double("hio.beta", 0.9);
    c.generator_weights = kv.get_or("generator.weights", "");
    c.dpr_steps = kv.get_long("dpr.steps", 1000);
    c.dpr_step_size = kv.get_double("dpr.step_size", 0.1);
    c.dpr_radius = kv.get_double("dpr.radius", std::numeric_limits<double>::infinity());

    c.prilo.init_steps = kv.get_long("prilo.init_steps", 150);
    c.prilo.init_radius = kv.get_double("prilo.init_radius", 100.0);
    c.prilo.step_size_latent = kv.get_double("prilo.step_size_latent", 0.1);
    c.prilo.step_size_hidden = kv.get_double("prilo.step_size_hidden", 0.01);
    c.prilo.phases.clear();
    for (int p = 0;; ++p) {
        const std::string prefix = "prilo.phase." + std::to_string(p) + ".";
        if (!kv.has(prefix + "layer")) break;
        PriloPhase ph;
        ph.target_layer = kv.get_long(prefix + "layer", 1);
        ph.repetitions = static_cast<int>(kv.get_long(prefix + "repetitions", 1));
        ph.stepA_steps = kv.get_long(prefix + "a_steps", 150);
        ph.stepA_radius = kv.get_double(prefix + "a_radius", 50.0);
        ph.stepB_steps = kv.get_long(prefix + "b_steps", 100);
        ph.stepB_radius = kv.get_double(prefix + "b_radius", c.prilo.init_radius);
        ph.stepC_steps = kv.get_long(prefix + "c_steps", 100);
        ph.stepC_radius = kv.get_double(prefix + "c_radius", c.prilo.init_radius);
        ph.back_projection = kv.get_bool(prefix + "back_projection", true);
        ph.refinement = kv.get_bool(prefix + "refinement", true);
        c.prilo.phases.push_back(ph);
    }
    c.prilo.noise.enabled = kv.get_bool("noise.enabled", true);
    c.prilo.noise.eta = kv.get_double("noise.eta", 0.02);
    c.prilo.noise.gamma = kv.get_double("noise.gamma", 0.55);
    c.prilo.noise_step_a = kv.get_bool("noise.step_a", true);
    c.prilo.noise_step_b = kv.get_bool("noise.step_b", true);
    c.prilo.noise_step_c = kv.get_bool("noise.step_c", true);

    c.init = parse_init(kv.get_or("init.kind", "random"));
    c.mii_candidates = kv.get_long("init.candidates", 5000);
    c.restarts = static_cast<int>(kv.get_long("restarts", 1));
    if (c.restarts < 1) throw ConfigError("restarts must be >= 1");
    c.seed = Seed(kv.get_u64("seed", 1));
    c.output_dir = kv.get_or("output.dir", "out");
    c.limit = kv.get_long("limit", 0);
    c.trace = kv.get_bool("trace.enabled", false);
    if (kv.has("register.enabled")) c.register_metrics = kv.get_bool("register.enabled", true);
    c.threads = static_cast<int>(kv.get_long("runtime.threads", 0));

    c.vae.latent_dim = kv.get_long("vae.latent", 32);
    c.vae.hidden_dims = parse_dims(kv.get_or("vae.hidden", "256"));
    c.vae.epochs = static_cast<int>(kv.get_long("vae.epochs", 20));
    c.vae.learning_rate = kv.get_double("vae.learning_rate", 1e-3);
    c.vae.batch_size = kv.get_long("vae.batch_size", 128);
    c.vae.seed = Seed(kv.get_u64("vae.seed", c.seed.value));
    return c;
}

KvFile ExperimentConfig::to_kv() const {
    KvFile kv;
    kv.set("dataset.images", dataset_images);
    if (!dataset_labels.empty()) kv.set("dataset.labels", dataset_labels);
    kv.set("dataset.format", dataset_format);
    if (dataset_format == "pgm-dir") {
        kv.set("dataset.height", std::to_string(pgm_shape.height));
        kv.set("dataset.width", std::to_string(pgm_shape.width));
    }
    kv.set("measurement.kind", measurement_kind_name(measurement));
    if (measurement != MeasurementKind::Fourier)
        kv.set("measurement.m", std::to_string(measurement_m));
    kv.set("method.name", method_kind_name(method));
    kv.set("er.iters", std::to_string(er_iters));
    kv.set("hio.iters", std::to_string(hio_iters));
    kv.set("hio.beta", format_double(hio_beta));
    if (!generator_weights.empty()) kv.set("generator.weights", generator_weights);
    kv.set("dpr.steps", std::to_string(dpr_steps));
    kv.set("dpr.step_size", format_double(dpr_step_size));
    kv.set("dpr.radius", format_double(dpr_radius));
    kv.set("prilo.init_steps", std::to_string(prilo.init_steps));
    kv.set("prilo.init_radius", format_double(prilo.init_radius));
    kv.set("prilo.step_size_latent", format_double(prilo.step_size_latent));
    kv.set("prilo.step_size_hidden", format_double(prilo.step_size_hidden));
    for (std::size_t p = 0; p < prilo.phases.size(); ++p) {
        const PriloPhase& ph = prilo.phases[p];
        const std::string prefix = "prilo.phase." + std::to_string(p) + ".";
        kv.set(prefix + "layer", std::to_string(ph.target_layer));
        kv.set(prefix + "repetitions", std::to_string(ph.repetitions));
        kv.set(prefix + "a_steps", std::to_string(ph.stepA_steps));
        kv.set(prefix + "a_radius", format_double(ph.stepA_radius));
        kv.set(prefix + "b_steps", std::to_string(ph.stepB_steps));
        kv.set(prefix + "b_radius", format_double(ph.stepB_radius));
        kv.set(prefix + "c_steps", std::to_string(ph.stepC_steps));
        kv.set(prefix + "c_radius", format_double(ph.stepC_radius));
        kv.set(prefix + "back_projection", ph.back_projection ? "true" : "false");
        kv.set(prefix + "refinement", ph.refinement ? "true" : "false");
    }
    kv.set("noise.enabled", prilo.noise.enabled ? "true" : "false");
    kv.set("noise.eta", format_double(prilo.noise.eta));
    kv.set("noise.gamma", format_double(prilo.noise.gamma));
    kv.set("noise.step_a", prilo.noise_step_a ? "true" : "false");
    kv.set("noise.step_b", prilo.noise_step_b ? "true" : "false");
    kv.set("noise.step_c", prilo.noise_step_c ? "true" : "false");
    kv.set("init.kind", init_kind_name(init));
    kv.set("init.candidates", std::to_string(mii_candidates));
    kv.set("restarts", std::to_string(restarts));
    kv.set("seed", std::to_string(seed.value));
    kv.set("output.dir", output_dir);
    kv.set("limit", std::to_string(limit));
    kv.set("trace.enabled", trace ? "true" : "false");
    if (register_metrics.has_value())
        kv.set("register.enabled", *register_metrics ? "true" : "false");
    kv.set("runtime.threads", std::to_string(threads));
    kv.set("vae.latent", std::to_string(vae.latent_dim));
    kv.set("vae.hidden", dims_to_string(vae.hidden_dims));
    kv.set("vae.epochs", std::to_string(vae.epochs));
    kv.set("vae.learning_rate", format_double(vae.learning_rate));
    kv.set("vae.batch_size", std::to_string(vae.batch_size));
    kv.set("vae.seed", std::to_string(vae.seed.value));
    return kv;
}

void ExperimentConfig::check_paths(bool need_dataset, bool need_weights) const {
    namespace fs = std::filesystem;
    if (need_dataset) {
        if (dataset_images.empty()) throw ConfigError("dataset.images is required");
        if (!fs::exists(dataset_images))
            throw ConfigError("dataset.images does not exist: " + dataset_images);
        if (!dataset_labels.empty() && !fs::exists(dataset_labels))
            throw ConfigError("dataset.labels does not exist: " + dataset_labels);
    }
    if (need_weights && (method == MethodKind::Dpr || method == MethodKind::Prilo)) {
        if (generator_weights.empty())
            throw ConfigError("generator.weights is required for method " +
                              method_kind_name(method));
        if (!fs::exists(generator_weights))
            throw ConfigError("generator.weights does not exist: " + generator_weights);
    }
}

}  // namespace pr
