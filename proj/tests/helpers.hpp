#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline double rel_err(double a, double b) {
    double denom = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) / denom;
}

/// Central finite difference of a scalar function w.r.t. one coordinate.
template <typename T, typename F>
double fd_grad(std::vector<T>& param, std::size_t i, F&& loss, double eps) {
    T saved = param[i];
    param[i] = saved + static_cast<T>(eps);
    double up = loss();
    param[i] = saved - static_cast<T>(eps);
    double down = loss();
    param[i] = saved;
    return (up - down) / (2 * eps);
}

/// Worst relative error between accumulated analytic gradients and central
/// finite differences, enumerated through the model's visit().
template <typename T, typename Model, typename F>
double max_grad_rel_err(Model& model, Model& grads, F&& loss, double eps) {
    std::vector<std::vector<T>*> ps, gs;
    model.visit("m", [&](const std::string&, std::vector<T>& v, std::size_t, std::size_t) {
        ps.push_back(&v);
    });
    grads.visit("m", [&](const std::string&, std::vector<T>& v, std::size_t, std::size_t) {
        gs.push_back(&v);
    });
    double worst = 0;
    for (std::size_t k = 0; k < ps.size(); ++k)
        for (std::size_t i = 0; i < ps[k]->size(); ++i) {
            double fd = fd_grad(*ps[k], i, loss, eps);
            worst = std::max(worst, rel_err(fd, double((*gs[k])[i])));
        }
    return worst;
}

/// Scratch directory unique per test binary; wiped on construction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& name) {
        path = std::filesystem::temp_directory_path() / name;
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
