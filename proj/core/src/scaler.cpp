#include "resfault/scaler.hpp"

#include <cmath>

#include "resfault/errors.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

ScalerParams fit_scaler(const Matrix& x) {
    const std::size_t n = x.rows(), d = x.cols();
    if (n == 0 || d == 0) throw InputError("scaler: empty matrix");
    ScalerParams p;
    p.mean.assign(d, 0.0);
    p.stddev.assign(d, 0.0);
    p.constant.assign(d, false);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) p.mean[c] += x(r, c);
    for (auto& m : p.mean) m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            double v = x(r, c) - p.mean[c];
            p.stddev[c] += v * v;
        }
    for (std::size_t c = 0; c < d; ++c) {
        p.stddev[c] = std::sqrt(p.stddev[c] / static_cast<double>(n));
        if (p.stddev[c] == 0.0) p.constant[c] = true;
    }
    return p;
}

Matrix apply_scaler(const ScalerParams& p, const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            out(r, c) = p.constant[c] ? 0.0 : (x(r, c) - p.mean[c]) / p.stddev[c];
        }
    }
    return out;
}

std::string scaler_serialize(const ScalerParams& p) {
    std::string out = "scaler v1\n";
    auto line = [&](const char* name, const std::vector<double>& v) {
        out += name;
        for (double x : v) {
            out += ' ';
            out += format_double_exact(x);
        }
        out += '\n';
    };
    line("mean", p.mean);
    line("std", p.stddev);
    return out;
}

ScalerParams scaler_deserialize(const std::string& text) {
    ScalerParams p;
    for (const auto& line : split_lines(text)) {
        auto parts = split(line, ' ');
        if (parts.empty()) continue;
        std::vector<double>* target = nullptr;
        if (parts[0] == "mean") target = &p.mean;
        else if (parts[0] == "std") target = &p.stddev;
        if (!target) continue;
        for (size_t i = 1; i < parts.size(); ++i)
            if (!parts[i].empty()) target->push_back(std::atof(parts[i].c_str()));
    }
    p.constant.assign(p.stddev.size(), false);
    for (size_t i = 0; i < p.stddev.size(); ++i)
        if (p.stddev[i] == 0.0) p.constant[i] = true;
    return p;
}

}  // namespace resfault
