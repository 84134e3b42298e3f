#pragma once

#include "nbhd/cell_table.hpp"
#include "nbhd/matrix.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testing {

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("nbhd_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline nbhd::Matrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    nbhd::Matrix m(rows, cols);
    for (auto& v : m.values()) {
        v = dist(gen);
    }
    return m;
}

inline nbhd::Matrix uniform_coords(std::mt19937_64& gen, std::size_t n, double side) {
    std::uniform_real_distribution<double> dist(0.0, side);
    nbhd::Matrix m(n, 2, std::vector<double>(n * 2), {"x", "y"});
    for (auto& v : m.values()) {
        v = dist(gen);
    }
    return m;
}

inline bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace testing
