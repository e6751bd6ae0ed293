#pragma once

#include <cstddef>

namespace pinlab {

struct Interval {
    double lo, hi;
    bool contains(double x) const { return x >= lo && x <= hi; }
    double length() const { return hi - lo; }
};

// Boxes Q_k of width l separated by gaps d, centred at origin + k(l+d).
// Q~_k is Q_k inset by r1; the cell Q~_{kj} is Q~_k x [y0+(j-1)h, y0+jh].
struct BoxLayout {
    double l;
    double d;
    double h;
    double r1;
    double origin = 0.0;  // centre of Q_0
    double y0 = 0.0;      // bottom of row 1
    std::size_t n_boxes = 1;
    std::size_t rows = 1;

    double pitch() const { return l + d; }
    double period() const { return static_cast<double>(n_boxes) * pitch(); }
    double center(std::size_t k) const { return origin + static_cast<double>(k) * pitch(); }
    Interval box(std::size_t k) const { return {center(k) - 0.5 * l, center(k) + 0.5 * l}; }
    Interval inner_box(std::size_t k) const { return {center(k) - 0.5 * l + r1, center(k) + 0.5 * l - r1}; }
    Interval row(std::size_t j) const {
        return {y0 + static_cast<double>(j - 1) * h, y0 + static_cast<double>(j) * h};
    }
    double cell_area() const { return (l - 2.0 * r1) * h; }
    // x range covered by the layout including half gaps on both sides
    Interval span() const { return {center(0) - 0.5 * pitch(), center(0) - 0.5 * pitch() + period()}; }
};

void validate(const BoxLayout& layout);

}  // namespace pinlab
