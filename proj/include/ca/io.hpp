#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "ca/classify.hpp"
#include "ca/errors.hpp"
#include "ca/hash.hpp"
#include "ca/sensing.hpp"

// File formats. All of them are specified to the byte:
//
//   CSMX    binary sensing matrix: magic "CSMX", version u8 (=1), ensemble u8
//           (0 gaussian, 1 bernoulli, 2 identity), seed u64, rows u32, cols
//           u32, all little-endian, followed either by rows*cols float64
//           little-endian row-major entries or by nothing at all (the matrix
//           regenerates from the header alone).
//   CSV     vectors: one value per line, '.' decimal separator, no header.
//           Values are written with shortest round-trip precision.
//   templates CSV: one row per class, first column the class id, then the
//           template values.
//   dataset CSV (regression): one observation per row, comma separated, the
//           last column is the response.
//   PGM     binary "P5" with maxval 255 only; pixels map to [0,1] by /255 and
//           are written back with round-half-up.
//   config  flat "key = value" lines, '#' starts a comment.

namespace ca {

namespace detail {

inline void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
public:
    ByteReader(const std::string& data, const std::string& what)
        : data_(data), what_(what) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) {
        if (pos_ + n > data_.size()) throw format_error(what_ + ": truncated file");
    }
    const std::string& data_;
    std::string what_;
    std::size_t pos_ = 0;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("cannot write '" + path + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw format_error("write failed for '" + path + "'");
}

inline double parse_double(std::string_view text, const std::string& what) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw format_error(what + ": malformed number '" + std::string(text) + "'");
    return value;
}

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

// --- CSMX sensing matrices -------------------------------------------------

inline constexpr std::uint8_t kMatrixFormatVersion = 1;

inline void save_matrix(const SensingMatrix& phi, const std::string& path,
                        bool header_only = false) {
    std::string out;
    out.reserve(22 + (header_only ? 0 : static_cast<std::size_t>(phi.rows()) * phi.cols() * 8));
    out += "CSMX";
    detail::put_u8(out, kMatrixFormatVersion);
    detail::put_u8(out, static_cast<std::uint8_t>(phi.id.ensemble));
    detail::put_u64(out, phi.id.seed);
    detail::put_u32(out, phi.id.rows);
    detail::put_u32(out, phi.id.cols);
    if (!header_only)
        for (int r = 0; r < phi.rows(); ++r)
            for (int c = 0; c < phi.cols(); ++c) detail::put_f64(out, phi.entries(r, c));
    detail::write_file(path, out);
}

inline SensingMatrix load_matrix(const std::string& path) {
    const std::string data = detail::read_file(path);
    if (data.size() < 22 || data.compare(0, 4, "CSMX") != 0)
        throw format_error(path + ": not a CSMX matrix file");
    detail::ByteReader r(data, path);
    r.u32(); // magic, already checked
    const std::uint8_t version = r.u8();
    if (version != kMatrixFormatVersion)
        throw format_error(path + ": unsupported CSMX version");
    const std::uint8_t ens = r.u8();
    if (ens > 2) throw format_error(path + ": unknown ensemble code");
    const std::uint64_t seed = r.u64();
    const std::uint32_t m = r.u32();
    const std::uint32_t n = r.u32();

    const std::size_t payload = static_cast<std::size_t>(m) * n * 8;
    if (r.remaining() == 0) {
        // Header-only file: regenerate deterministically.
        return generate_matrix(seed, static_cast<int>(m), static_cast<int>(n),
                               static_cast<Ensemble>(ens));
    }
    if (r.remaining() != payload)
        throw format_error(path + ": payload size does not match header");
    SensingMatrix phi;
    phi.id = MatrixId{seed, m, n, static_cast<Ensemble>(ens)};
    phi.entries.resize(m, n);
    for (std::uint32_t i = 0; i < m; ++i)
        for (std::uint32_t j = 0; j < n; ++j) phi.entries(i, j) = r.f64();
    return phi;
}

// --- CSV vectors and datasets ------------------------------------------------

inline void save_vector_csv(const Vec& v, const std::string& path) {
    std::string out;
    for (int i = 0; i < v.size(); ++i) {
        out += detail::format_double(v[i]);
        out += '\n';
    }
    detail::write_file(path, out);
}

inline Vec load_vector_csv(const std::string& path) {
    const std::string data = detail::read_file(path);
    std::vector<double> values;
    std::size_t start = 0;
    while (start < data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string::npos) end = data.size();
        const std::string_view line = detail::trim(std::string_view(data).substr(start, end - start));
        if (!line.empty()) values.push_back(detail::parse_double(line, path));
        start = end + 1;
    }
    if (values.empty()) throw format_error(path + ": empty vector file");
    Vec v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
    return v;
}

inline void save_templates_csv(const ClassTemplates& t, const std::string& path) {
    std::string out;
    for (int c = 0; c < t.num_classes(); ++c) {
        out += t.classes[static_cast<std::size_t>(c)];
        const Vec& tpl = t.templates[static_cast<std::size_t>(c)];
        for (int i = 0; i < tpl.size(); ++i) {
            out += ',';
            out += detail::format_double(tpl[i]);
        }
        out += '\n';
    }
    detail::write_file(path, out);
}

inline ClassTemplates load_templates_csv(const std::string& path) {
    const std::string data = detail::read_file(path);
    ClassTemplates t;
    std::size_t start = 0;
    while (start < data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string::npos) end = data.size();
        const std::string_view line = detail::trim(std::string_view(data).substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string_view::npos) comma = line.size();
            fields.push_back(detail::trim(line.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        if (fields.size() < 2) throw format_error(path + ": template row needs id and values");
        t.classes.emplace_back(fields[0]);
        Vec tpl(static_cast<Eigen::Index>(fields.size() - 1));
        for (std::size_t i = 1; i < fields.size(); ++i)
            tpl[static_cast<Eigen::Index>(i - 1)] = detail::parse_double(fields[i], path);
        t.templates.push_back(std::move(tpl));
    }
    if (t.num_classes() < 2) throw format_error(path + ": need at least two template rows");
    for (const Vec& tpl : t.templates)
        if (tpl.size() != t.templates.front().size())
            throw format_error(path + ": template rows differ in length");
    for (int a = 0; a < t.num_classes(); ++a)
        for (int b = a + 1; b < t.num_classes(); ++b)
            if (t.classes[static_cast<std::size_t>(a)] == t.classes[static_cast<std::size_t>(b)])
                throw format_error(path + ": duplicate class id '" +
                                   t.classes[static_cast<std::size_t>(a)] + "'");
    return t;
}

// Rows of comma-separated numbers; the last column is the response.
inline std::pair<Mat, Vec> load_dataset_csv(const std::string& path) {
    const std::string data = detail::read_file(path);
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (start < data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string::npos) end = data.size();
        const std::string_view line = detail::trim(std::string_view(data).substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string_view::npos) comma = line.size();
            row.push_back(detail::parse_double(detail::trim(line.substr(pos, comma - pos)), path));
            pos = comma + 1;
        }
        if (row.size() < 2) throw format_error(path + ": dataset rows need predictors and response");
        if (!rows.empty() && row.size() != rows.front().size())
            throw format_error(path + ": ragged dataset rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw format_error(path + ": empty dataset");
    const std::size_t p = rows.front().size() - 1;
    Mat x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
    Vec y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < p; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        y[static_cast<Eigen::Index>(i)] = rows[i][p];
    }
    return {std::move(x), std::move(y)};
}

// --- PGM images --------------------------------------------------------------

inline GrayImage load_pgm(const std::string& path) {
    const std::string data = detail::read_file(path);
    std::size_t pos = 0;

    const auto skip_space = [&] {
        while (pos < data.size()) {
            const char c = data[pos];
            if (c == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    };
    const auto read_int = [&]() -> long {
        skip_space();
        std::size_t start = pos;
        while (pos < data.size() && data[pos] >= '0' && data[pos] <= '9') ++pos;
        if (pos == start) throw format_error(path + ": malformed PGM header");
        long v = 0;
        for (std::size_t i = start; i < pos; ++i) v = v * 10 + (data[i] - '0');
        return v;
    };

    if (data.size() < 2 || data[0] != 'P' || data[1] != '5')
        throw format_error(path + ": only binary PGM (P5) is supported");
    pos = 2;
    const long width = read_int();
    const long height = read_int();
    const long maxval = read_int();
    if (width < 1 || height < 1) throw format_error(path + ": bad PGM dimensions");
    if (maxval != 255) throw format_error(path + ": PGM maxval must be 255");
    if (pos >= data.size()) throw format_error(path + ": truncated PGM");
    ++pos; // single whitespace byte after maxval

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (data.size() - pos < count) throw format_error(path + ": truncated PGM payload");

    std::vector<double> pixels(count);
    for (std::size_t i = 0; i < count; ++i)
        pixels[i] = static_cast<unsigned char>(data[pos + i]) / 255.0;
    return make_image(static_cast<int>(height), static_cast<int>(width), std::move(pixels));
}

inline void save_pgm(const GrayImage& img, const std::string& path) {
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.reserve(out.size() + img.pixels.size());
    for (double p : img.pixels) {
        const double scaled = std::floor(p * 255.0 + 0.5); // round half up
        const double clamped = std::clamp(scaled, 0.0, 255.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(clamped)));
    }
    detail::write_file(path, out);
}

// --- flat key = value config ---------------------------------------------------

inline std::map<std::string, std::string> load_config(const std::string& path) {
    const std::string data = detail::read_file(path);
    std::map<std::string, std::string> kv;
    std::size_t start = 0;
    int lineno = 0;
    while (start <= data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string::npos) end = data.size();
        std::string_view line = std::string_view(data).substr(start, end - start);
        start = end + 1;
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) {
            if (end == data.size()) break;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw format_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty())
            throw format_error(path + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw format_error(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
        if (end == data.size()) break;
    }
    return kv;
}

} // namespace ca
