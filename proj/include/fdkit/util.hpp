#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fdk {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull);
std::uint64_t mix64(std::uint64_t x);
std::string hex64(std::uint64_t x);

// mt19937_64 with portable distributions, so seeded streams match across standard libraries
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next() { return eng_(); }
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n);
    double normal();
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// runs fn(0..n-1) on up to `jobs` threads; rethrows the first exception after all workers stop
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // -1 when absent
    int column(std::string_view name) const;
    int require(std::string_view name) const;
};

// RFC-4180 with '#' comment lines skipped before the header
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
std::string csv_field(std::string_view s);

std::string format_fixed(double v, int decimals);
std::string format_sig(double v, int digits);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace fdk
