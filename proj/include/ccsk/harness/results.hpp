#ifndef CCSK_HARNESS_RESULTS_HPP
#define CCSK_HARNESS_RESULTS_HPP

// ResultRow and its CSV form. Reals are written with std::to_chars (shortest
// round-trip form, '.' separator, locale independent).

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "ccsk/error.hpp"
#include "ccsk/harness/stats.hpp"

namespace ccsk::harness {

struct ResultRow {
    std::string detector;
    std::string channel;
    std::size_t M{0};
    std::size_t k{0};
    std::size_t beta{0};
    std::size_t d{0};
    double ebn0_db{0.0};
    std::uint64_t symbols{0};
    std::uint64_t symbol_errors{0};
    double ser{0.0};
    std::uint64_t bit_errors{0};
    double ber{0.0};
    std::uint64_t seed{0};
    double ser_ci95{0.0};

    bool operator==(const ResultRow&) const = default;
};

// Fills ser / ber / ser_ci95 from the counts.
inline void finalize(ResultRow& r, std::size_t bits_per_symbol)
{
    const double n = static_cast<double>(r.symbols);
    r.ser = r.symbols ? static_cast<double>(r.symbol_errors) / n : 0.0;
    r.ber = r.symbols ? static_cast<double>(r.bit_errors) / (n * static_cast<double>(bits_per_symbol)) : 0.0;
    r.ser_ci95 = ser_ci95(r.symbol_errors, r.symbols);
}

inline constexpr const char* kCsvHeader =
    "detector,channel,M,k,beta,d,ebn0_db,symbols,symbol_errors,ser,bit_errors,ber,seed,ser_ci95";

namespace detail {

inline std::string fmt_real(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& s, const char* field)
{
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw FormatError(std::string("bad value '") + s + "' in CSV field " + field);
    return v;
}

} // namespace detail

inline std::string to_csv_line(const ResultRow& r)
{
    std::ostringstream os;
    os << r.detector << ',' << r.channel << ',' << r.M << ',' << r.k << ',' << r.beta << ',' << r.d << ','
       << detail::fmt_real(r.ebn0_db) << ',' << r.symbols << ',' << r.symbol_errors << ',' << detail::fmt_real(r.ser)
       << ',' << r.bit_errors << ',' << detail::fmt_real(r.ber) << ',' << r.seed << ','
       << detail::fmt_real(r.ser_ci95);
    return os.str();
}

inline std::string to_csv(const std::vector<ResultRow>& rows, bool header = true)
{
    std::string out;
    if (header) out += std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) out += to_csv_line(r) + "\n";
    return out;
}

inline ResultRow parse_csv_line(const std::string& line)
{
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 14) throw FormatError("CSV row has " + std::to_string(f.size()) + " fields, expected 14");
    using detail::parse_number;
    ResultRow r;
    r.detector = f[0];
    r.channel = f[1];
    r.M = parse_number<std::size_t>(f[2], "M");
    r.k = parse_number<std::size_t>(f[3], "k");
    r.beta = parse_number<std::size_t>(f[4], "beta");
    r.d = parse_number<std::size_t>(f[5], "d");
    r.ebn0_db = parse_number<double>(f[6], "ebn0_db");
    r.symbols = parse_number<std::uint64_t>(f[7], "symbols");
    r.symbol_errors = parse_number<std::uint64_t>(f[8], "symbol_errors");
    r.ser = parse_number<double>(f[9], "ser");
    r.bit_errors = parse_number<std::uint64_t>(f[10], "bit_errors");
    r.ber = parse_number<double>(f[11], "ber");
    r.seed = parse_number<std::uint64_t>(f[12], "seed");
    r.ser_ci95 = parse_number<double>(f[13], "ser_ci95");
    return r;
}

inline std::vector<ResultRow> parse_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw FormatError("missing or unexpected CSV header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(parse_csv_line(line));
    }
    return rows;
}

inline std::vector<ResultRow> read_results(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_csv(in);
}

// Overwrites (or appends to) `path`. The header is written only to a new or
// empty file; nothing is written if the file cannot be opened.
inline void emit_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path, bool append = false)
{
    std::error_code ec;
    const bool has_content = append && std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0;
    const std::string text = to_csv(rows, !has_content);
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw IoError("cannot write results to " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace ccsk::harness

#endif
