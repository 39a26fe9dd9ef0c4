#include "cwica/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "cwica/csv.hpp"
#include "cwica/stats.hpp"

namespace cwica {

using nlohmann::json;

std::string to_string(MixKind kind) {
    switch (kind) {
    case MixKind::nonlinear_synthetic: return "nonlinear-synthetic";
    case MixKind::linear_synthetic: return "linear-synthetic";
    case MixKind::image_nonlinear: return "image-nonlinear";
    case MixKind::image_linear: return "image-linear";
    }
    return "?";
}

MixKind mix_kind_from_string(const std::string& s) {
    if (s == "nonlinear-synthetic") return MixKind::nonlinear_synthetic;
    if (s == "linear-synthetic") return MixKind::linear_synthetic;
    if (s == "image-nonlinear") return MixKind::image_nonlinear;
    if (s == "image-linear") return MixKind::image_linear;
    throw config_error("unknown dataset kind: '" + s + "'");
}

Matrix Dataset::observations_at(const std::vector<std::size_t>& idx) const {
    return observations.take_rows(idx);
}

std::optional<Matrix> Dataset::sources_at(const std::vector<std::size_t>& idx) const {
    if (!sources) return std::nullopt;
    return sources->take_rows(idx);
}

Matrix sample_mixing_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-2.0, 2.0);
    return m;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signal bank. All members are cyclostationary so that any window of the
// time axis is distributionally equivalent; the "chirp" is a cyclic FM
// sweep rather than a one-way ramp for the same reason.
double bank_signal(std::size_t member, double t, double freq_scale, double phase,
                   double phase2) {
    switch (member) {
    case 0: // sine
        return std::sin(kTwoPi * 0.0113 * freq_scale * t + phase);
    case 1: // square
        return std::sin(kTwoPi * 0.0047 * freq_scale * t + phase) >= 0.0 ? 1.0 : -1.0;
    case 2: { // sawtooth
        const double u = 0.0071 * freq_scale * t + phase / kTwoPi;
        return 2.0 * (u - std::floor(u)) - 1.0;
    }
    case 3: // cyclic frequency sweep (FM)
        return std::sin(kTwoPi * 0.0091 * freq_scale * t +
                        5.0 * std::sin(kTwoPi * 0.00037 * freq_scale * t + phase2) +
                        phase);
    case 4: // amplitude-modulated sine
        return (0.5 + 0.5 * std::sin(kTwoPi * 0.00083 * freq_scale * t + phase2)) *
               std::sin(kTwoPi * 0.0173 * freq_scale * t + phase);
    default:
        return 0.0; // member 5 is pure uniform noise, filled by the caller
    }
}

} // namespace

Matrix gen_sources(std::size_t n, std::size_t d, Rng& rng) {
    if (n < 1 || d < 1) throw dimension_error("gen_sources: n and d must be >= 1");
    Matrix y(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t member = j % 6;
        const std::size_t cycle = j / 6;
        const double freq_scale = 1.0 + 0.37 * static_cast<double>(cycle);
        const double phase = rng.uniform(0.0, kTwoPi);
        const double phase2 = rng.uniform(0.0, kTwoPi);
        if (member == 5) {
            for (std::size_t i = 0; i < n; ++i) y(i, j) = rng.uniform(-1.0, 1.0);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const double clean =
                    bank_signal(member, static_cast<double>(i), freq_scale, phase, phase2);
                y(i, j) = clean + 0.05 * rng.normal();
            }
        }
    }
    if (n >= 2) y = standardize_columns(y);
    return y;
}

Matrix mix_nonlinear(const Matrix& y, const Matrix& a, const Matrix& b) {
    Matrix inner = matmul(y, a);
    for (double& v : inner.data()) v = std::tanh(v);
    Matrix x = matmul(inner, b);
    for (double& v : x.data()) v = std::tanh(v);
    return x;
}

Matrix mix_linear(const Matrix& y, const Matrix& a) { return matmul(y, a); }

Matrix mix_image(const Matrix& y, const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != y.cols() ||
        b.rows() != y.cols())
        throw dimension_error("mix_image: A and B must be square of the source dimension");
    Matrix inner = matmul(y, a);
    for (double& v : inner.data()) v = std::tanh(v);
    Matrix x = matmul(inner, b);
    for (double& v : x.data()) v = v * v + v * v * v;
    return x;
}

Dataset make_synthetic(MixKind kind, std::size_t n, std::uint64_t seed,
                       bool normalize_obs) {
    if (kind != MixKind::nonlinear_synthetic && kind != MixKind::linear_synthetic)
        throw config_error("make_synthetic: kind must be a synthetic variant");
    if (n < 1000) throw config_error("make_synthetic: need n >= 1000");

    Rng rng(seed);
    Rng rng_src = rng.sub("sources");
    Rng rng_mix = rng.sub("mixing");

    const std::size_t total = n + kValidationRows;
    Matrix y = gen_sources(total, kSyntheticSources, rng_src);

    Dataset ds;
    ds.kind = kind;
    ds.seed = seed;
    ds.normalized_obs = normalize_obs;
    Matrix a = sample_mixing_matrix(kSyntheticSources, kSyntheticObsDim, rng_mix);
    if (kind == MixKind::nonlinear_synthetic) {
        Matrix b = sample_mixing_matrix(kSyntheticObsDim, kSyntheticObsDim, rng_mix);
        ds.observations = mix_nonlinear(y, a, b);
        ds.mix_b = std::move(b);
    } else {
        ds.observations = mix_linear(y, a);
    }
    ds.mix_a = std::move(a);
    ds.sources = std::move(y);
    if (normalize_obs) ds.observations = standardize_columns(ds.observations);

    ds.splits.test.resize(kTestRows);
    std::iota(ds.splits.test.begin(), ds.splits.test.end(), std::size_t{0});
    ds.splits.train.resize(n - kTestRows);
    std::iota(ds.splits.train.begin(), ds.splits.train.end(), kTestRows);
    ds.splits.validation.resize(kValidationRows);
    std::iota(ds.splits.validation.begin(), ds.splits.validation.end(), n);
    return ds;
}

std::size_t default_image_replications(std::size_t dim) {
    switch (dim) {
    case 2: return 50;
    case 5: return 50;
    case 10: return 20;
    case 20: return 10;
    default: throw config_error("image dimension must be one of {2, 5, 10, 20}");
    }
}

Matrix load_pgm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open image: " + path.string());
    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = f.get()) != EOF) {
            if (c == '#') { // comment to end of line
                while ((c = f.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        if (tok.empty()) throw io_error("truncated PGM header: " + path.string());
        return tok;
    };
    if (next_token() != "P5") throw io_error("not a binary PGM (P5): " + path.string());
    const std::size_t width = std::stoul(next_token());
    const std::size_t height = std::stoul(next_token());
    const unsigned long maxval = std::stoul(next_token());
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535)
        throw io_error("bad PGM dimensions: " + path.string());
    Matrix img(height, width);
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(width * height * bytes_per);
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(f.gcount()) != raw.size())
        throw io_error("truncated PGM pixel data: " + path.string());
    for (std::size_t p = 0; p < width * height; ++p) {
        unsigned long v = bytes_per == 1
                              ? raw[p]
                              : (static_cast<unsigned long>(raw[2 * p]) << 8) | raw[2 * p + 1];
        img.data()[p] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return img;
}

Matrix resize_bilinear(const Matrix& img, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw dimension_error("resize_bilinear: empty target");
    Matrix out(rows, cols);
    const double rscale =
        rows > 1 ? static_cast<double>(img.rows() - 1) / static_cast<double>(rows - 1) : 0.0;
    const double cscale =
        cols > 1 ? static_cast<double>(img.cols() - 1) / static_cast<double>(cols - 1) : 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double fr = static_cast<double>(r) * rscale;
        const std::size_t r0 = static_cast<std::size_t>(fr);
        const std::size_t r1 = std::min(r0 + 1, img.rows() - 1);
        const double wr = fr - static_cast<double>(r0);
        for (std::size_t c = 0; c < cols; ++c) {
            const double fc = static_cast<double>(c) * cscale;
            const std::size_t c0 = static_cast<std::size_t>(fc);
            const std::size_t c1 = std::min(c0 + 1, img.cols() - 1);
            const double wc = fc - static_cast<double>(c0);
            out(r, c) = (1 - wr) * ((1 - wc) * img(r0, c0) + wc * img(r0, c1)) +
                        wr * ((1 - wc) * img(r1, c0) + wc * img(r1, c1));
        }
    }
    return out;
}

namespace {

void minmax_normalize(Matrix& img) {
    double lo = img.data()[0], hi = img.data()[0];
    for (double v : img.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) return; // left flat; degenerate filter handles it
    for (double& v : img.data()) v = (v - lo) / (hi - lo);
}

} // namespace

std::vector<Matrix> procedural_textures(std::size_t count, std::size_t height,
                                        std::size_t width, Rng& rng) {
    std::vector<Matrix> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Matrix img(height, width, 0.0);
        const std::size_t type = rng.uniform_index(6);
        switch (type) {
        case 0: { // sinusoidal grating
            const double fx = rng.uniform(0.02, 0.25), fy = rng.uniform(0.02, 0.25);
            const double ph = rng.uniform(0.0, kTwoPi);
            for (std::size_t r = 0; r < height; ++r)
                for (std::size_t c = 0; c < width; ++c)
                    img(r, c) = std::sin(kTwoPi * (fx * c + fy * r) + ph);
            break;
        }
        case 1: { // checkerboard
            const double sx = rng.uniform(4.0, 16.0), sy = rng.uniform(4.0, 16.0);
            for (std::size_t r = 0; r < height; ++r)
                for (std::size_t c = 0; c < width; ++c) {
                    const long q = static_cast<long>(std::floor(c / sx)) +
                                   static_cast<long>(std::floor(r / sy));
                    img(r, c) = (q % 2 == 0) ? 1.0 : 0.0;
                }
            break;
        }
        case 2: { // Gaussian blobs
            const std::size_t blobs = 3 + rng.uniform_index(4);
            for (std::size_t bidx = 0; bidx < blobs; ++bidx) {
                const double cx = rng.uniform(0.0, static_cast<double>(width));
                const double cy = rng.uniform(0.0, static_cast<double>(height));
                const double sigma = rng.uniform(5.0, 20.0);
                const double amp = rng.uniform(0.4, 1.0);
                for (std::size_t r = 0; r < height; ++r)
                    for (std::size_t c = 0; c < width; ++c) {
                        const double dx = c - cx, dy = r - cy;
                        img(r, c) += amp * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
                    }
            }
            break;
        }
        case 3: { // bilinear value noise
            const std::size_t g = 4 + rng.uniform_index(5);
            Matrix grid(g, g);
            for (double& v : grid.data()) v = rng.uniform01();
            img = resize_bilinear(grid, height, width);
            break;
        }
        case 4: { // warped linear gradient
            const double ang = rng.uniform(0.0, kTwoPi);
            const double warp = rng.uniform(0.0, 8.0), wf = rng.uniform(0.02, 0.1);
            const double dx = std::cos(ang), dy = std::sin(ang);
            for (std::size_t r = 0; r < height; ++r)
                for (std::size_t c = 0; c < width; ++c)
                    img(r, c) = dx * c + dy * r + warp * std::sin(kTwoPi * wf * (c + r));
            break;
        }
        default: { // filled disks
            const std::size_t disks = 4 + rng.uniform_index(5);
            for (std::size_t didx = 0; didx < disks; ++didx) {
                const double cx = rng.uniform(0.0, static_cast<double>(width));
                const double cy = rng.uniform(0.0, static_cast<double>(height));
                const double rad = rng.uniform(4.0, 18.0);
                const double level = rng.uniform(0.3, 1.0);
                for (std::size_t r = 0; r < height; ++r)
                    for (std::size_t c = 0; c < width; ++c) {
                        const double ddx = c - cx, ddy = r - cy;
                        if (ddx * ddx + ddy * ddy <= rad * rad) img(r, c) = level;
                    }
            }
            break;
        }
        }
        minmax_normalize(img);
        out.push_back(std::move(img));
    }
    return out;
}

std::vector<Dataset> make_image_dataset(
    const std::vector<std::filesystem::path>& image_paths, std::size_t dim,
    MixKind kind, std::uint64_t seed, std::size_t replications,
    const std::function<void(const std::string&)>& warn) {
    if (kind != MixKind::image_nonlinear && kind != MixKind::image_linear)
        throw config_error("make_image_dataset: kind must be an image variant");
    if (dim != 2 && dim != 5 && dim != 10 && dim != 20)
        throw config_error("image dimension must be one of {2, 5, 10, 20}");
    if (replications == 0) replications = default_image_replications(dim);

    Rng rng(seed);
    const std::size_t n = kImageWidth * kImageHeight;

    // Build the flattened source corpus, dropping degenerate images.
    std::vector<std::vector<double>> corpus;
    std::vector<std::string> names;
    auto admit = [&](Matrix img, const std::string& name) {
        Matrix flat(n, 1);
        std::copy(img.data().begin(), img.data().end(), flat.data().begin());
        double mean = 0.0;
        for (double v : flat.data()) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : flat.data()) var += (v - mean) * (v - mean);
        if (std::sqrt(var / static_cast<double>(n)) < kDegenerateStd) {
            if (warn) warn("degenerate (constant) source image rejected: " + name);
            return;
        }
        corpus.push_back(std::move(flat.data()));
        names.push_back(name);
    };
    if (image_paths.empty()) {
        Rng rng_tex = rng.sub("textures");
        auto textures = procedural_textures(100, kImageHeight, kImageWidth, rng_tex);
        for (std::size_t k = 0; k < textures.size(); ++k)
            admit(std::move(textures[k]), "texture#" + std::to_string(k));
    } else {
        for (const auto& p : image_paths) {
            Matrix img = load_pgm(p);
            if (img.rows() != kImageHeight || img.cols() != kImageWidth)
                img = resize_bilinear(img, kImageHeight, kImageWidth);
            admit(std::move(img), p.string());
        }
    }
    if (corpus.size() < dim)
        throw config_error("insufficient non-degenerate source images: have " +
                           std::to_string(corpus.size()) + ", need " + std::to_string(dim));

    std::vector<Dataset> out;
    out.reserve(replications);
    for (std::size_t rep = 0; rep < replications; ++rep) {
        Rng rng_rep = rng.sub("replication").sub(rep);
        std::vector<std::size_t> order(corpus.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng_rep.shuffle(order.begin(), order.end());

        Matrix y(n, dim);
        for (std::size_t j = 0; j < dim; ++j)
            y.set_column(j, corpus[order[j]]);

        Dataset ds;
        ds.kind = kind;
        ds.seed = rng_rep.seed();
        Matrix a = sample_mixing_matrix(dim, dim, rng_rep);
        if (kind == MixKind::image_nonlinear) {
            Matrix b = sample_mixing_matrix(dim, dim, rng_rep);
            ds.observations = mix_image(y, a, b);
            ds.mix_b = std::move(b);
        } else {
            ds.observations = mix_linear(y, a);
        }
        ds.mix_a = std::move(a);
        ds.sources = std::move(y);
        ds.observations = standardize_columns(ds.observations);
        ds.normalized_obs = true;

        ds.splits.test.resize(kTestRows);
        std::iota(ds.splits.test.begin(), ds.splits.test.end(), std::size_t{0});
        ds.splits.validation.resize(kValidationRows);
        std::iota(ds.splits.validation.begin(), ds.splits.validation.end(), kTestRows);
        ds.splits.train.resize(n - kTestRows - kValidationRows);
        std::iota(ds.splits.train.begin(), ds.splits.train.end(),
                  kTestRows + kValidationRows);
        out.push_back(std::move(ds));
    }
    return out;
}

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (double v : m.row(i)) row.push_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const std::size_t rows = j.size();
    if (rows == 0) throw io_error("empty matrix in JSON");
    const std::size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw io_error("ragged matrix in JSON");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    f << j.dump(2) << '\n';
    if (!f) throw io_error("write failed: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open: " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw io_error("bad JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

} // namespace

void save_dataset(const std::filesystem::path& dir, const Dataset& ds) {
    std::filesystem::create_directories(dir);
    write_matrix_csv(dir / "observations.csv", ds.observations);
    if (ds.sources) write_matrix_csv(dir / "sources.csv", *ds.sources);

    json splits = {{"test", ds.splits.test},
                   {"train", ds.splits.train},
                   {"validation", ds.splits.validation}};
    write_json_file(dir / "splits.json", splits);

    json meta = {{"format_version", 1},
                 {"kind", to_string(ds.kind)},
                 {"seed", ds.seed},
                 {"normalized_obs", ds.normalized_obs},
                 {"rows", ds.observations.rows()},
                 {"obs_dim", ds.observations.cols()}};
    json checksums = {{"observations", matrix_checksum(ds.observations)}};
    if (ds.sources) {
        meta["source_dim"] = ds.sources->cols();
        checksums["sources"] = matrix_checksum(*ds.sources);
    }
    if (ds.mix_a) {
        meta["mix_a"] = matrix_to_json(*ds.mix_a);
        checksums["mix_a"] = matrix_checksum(*ds.mix_a);
    }
    if (ds.mix_b) {
        meta["mix_b"] = matrix_to_json(*ds.mix_b);
        checksums["mix_b"] = matrix_checksum(*ds.mix_b);
    }
    meta["checksums"] = checksums;
    write_json_file(dir / "meta.json", meta);
}

Dataset load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir / "meta.json"))
        throw io_error("not a dataset directory (missing meta.json): " + dir.string());
    const json meta = read_json_file(dir / "meta.json");
    Dataset ds;
    ds.kind = mix_kind_from_string(meta.at("kind").get<std::string>());
    ds.seed = meta.at("seed").get<std::uint64_t>();
    ds.normalized_obs = meta.at("normalized_obs").get<bool>();
    ds.observations = read_matrix_csv(dir / "observations.csv");
    if (std::filesystem::exists(dir / "sources.csv"))
        ds.sources = read_matrix_csv(dir / "sources.csv");
    if (meta.contains("mix_a")) ds.mix_a = matrix_from_json(meta["mix_a"]);
    if (meta.contains("mix_b")) ds.mix_b = matrix_from_json(meta["mix_b"]);

    const json splits = read_json_file(dir / "splits.json");
    ds.splits.test = splits.at("test").get<std::vector<std::size_t>>();
    ds.splits.train = splits.at("train").get<std::vector<std::size_t>>();
    ds.splits.validation = splits.at("validation").get<std::vector<std::size_t>>();

    // integrity check against the recorded checksums
    const json& sums = meta.at("checksums");
    if (sums.at("observations").get<std::string>() != matrix_checksum(ds.observations))
        throw io_error("observations.csv checksum mismatch in " + dir.string());
    if (ds.sources && sums.contains("sources") &&
        sums.at("sources").get<std::string>() != matrix_checksum(*ds.sources))
        throw io_error("sources.csv checksum mismatch in " + dir.string());
    return ds;
}

} // namespace cwica
