#include "vsense/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "vsense/errors.hpp"
#include "vsense/parallel.hpp"

namespace vsense {

GridSpec::GridSpec(double half_x, double half_y, int cells_x, int cells_y)
    : half_extent_x(half_x), half_extent_y(half_y), nx(cells_x), ny(cells_y) {
    if (!(std::isfinite(half_x) && half_x > 0.0) || !(std::isfinite(half_y) && half_y > 0.0))
        throw ConfigError("GridSpec: half extents must be positive and finite");
    if (nx < 16 || ny < 16)
        throw ConfigError("GridSpec: nx and ny must be at least 16");
}

ScalarField::ScalarField(const GridSpec& s, std::vector<double> v)
    : spec(s), values(std::move(v)) {
    if (values.size() != spec.cell_count())
        throw ConfigError("ScalarField: value count does not match grid");
}

ComplexField::ComplexField(const GridSpec& s, std::vector<Complex> v)
    : spec(s), values(std::move(v)) {
    if (values.size() != spec.cell_count())
        throw ConfigError("ComplexField: value count does not match grid");
}

std::size_t GridMask::count() const {
    std::size_t n = 0;
    for (auto b : on) n += b ? 1 : 0;
    return n;
}

GridMask interior_mask(const GridSpec& spec, int ring) {
    GridMask mask(spec, false);
    for (int iy = ring; iy < spec.ny - ring; ++iy)
        for (int ix = ring; ix < spec.nx - ring; ++ix)
            mask.on[spec.index(ix, iy)] = 1;
    return mask;
}

void mask_disk(GridMask& mask, Complex center, double radius) {
    const double r2 = radius * radius;
    const GridSpec& spec = mask.spec;
    for (int iy = 0; iy < spec.ny; ++iy) {
        const double dy = spec.y(iy) - center.imag();
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double dx = spec.x(ix) - center.real();
            if (dx * dx + dy * dy <= r2) mask.on[spec.index(ix, iy)] = 0;
        }
    }
}

PhysicalConstants::PhysicalConstants(double kappa_value) : kappa(kappa_value) {
    if (!(std::isfinite(kappa) && kappa != 0.0))
        throw ConfigError("PhysicalConstants: kappa must be finite and nonzero");
}

namespace {

// Shared by integrate/inner: per-row partial sums in strict left-to-right
// order, rows combined in order afterwards. Non-finite input is flagged
// per row and reported after the parallel region.
template <class T, class CellValue>
T reduce_cells_checked(const GridSpec& spec, const char* what, CellValue&& cell) {
    std::vector<T> parts(static_cast<std::size_t>(spec.ny), T{});
    std::vector<std::uint8_t> bad(static_cast<std::size_t>(spec.ny), 0);
    for_each_row(spec.ny, [&](int iy) {
        T acc{};
        for (int ix = 0; ix < spec.nx; ++ix) {
            T v = cell(ix, iy);
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) bad[iy] = 1;
            } else {
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) bad[iy] = 1;
            }
            acc += v;
        }
        parts[static_cast<std::size_t>(iy)] = acc;
    });
    for (int iy = 0; iy < spec.ny; ++iy)
        if (bad[static_cast<std::size_t>(iy)])
            throw ConfigError(std::string(what) + ": non-finite cell value in row " +
                              std::to_string(iy));
    T total{};
    for (int iy = 0; iy < spec.ny; ++iy) total += parts[static_cast<std::size_t>(iy)];
    return total;
}

}  // namespace

double integrate(const ScalarField& field) {
    const double cell_area = field.spec.hx() * field.spec.hy();
    const double sum = reduce_cells_checked<double>(
        field.spec, "integrate", [&](int ix, int iy) { return field.at(ix, iy); });
    return sum * cell_area;
}

double integrate(const ScalarField& field,
                 const std::function<double(double, double)>& weight) {
    const GridSpec& spec = field.spec;
    const double cell_area = spec.hx() * spec.hy();
    const double sum = reduce_cells_checked<double>(
        spec, "integrate", [&](int ix, int iy) {
            return field.at(ix, iy) * weight(spec.x(ix), spec.y(iy));
        });
    return sum * cell_area;
}

ScalarField laplacian(const ScalarField& field) {
    const GridSpec& spec = field.spec;
    if (spec.nx < 3 || spec.ny < 3) throw ConfigError("laplacian: grid too small");
    ScalarField out(spec);
    const double inv_hx2 = 1.0 / (spec.hx() * spec.hx());
    const double inv_hy2 = 1.0 / (spec.hy() * spec.hy());
    for_each_row(spec.ny, [&](int iy) {
        if (iy == 0 || iy == spec.ny - 1) return;
        for (int ix = 1; ix < spec.nx - 1; ++ix) {
            const double c = field.at(ix, iy);
            out.at(ix, iy) = (field.at(ix + 1, iy) + field.at(ix - 1, iy) - 2.0 * c) * inv_hx2 +
                             (field.at(ix, iy + 1) + field.at(ix, iy - 1) - 2.0 * c) * inv_hy2;
        }
    });
    return out;
}

Complex inner(const ComplexField& a, const ComplexField& b) {
    if (!(a.spec == b.spec)) throw ConfigError("inner: grid mismatch");
    const double cell_area = a.spec.hx() * a.spec.hy();
    const Complex sum = reduce_cells_checked<Complex>(
        a.spec, "inner", [&](int ix, int iy) { return std::conj(a.at(ix, iy)) * b.at(ix, iy); });
    return sum * cell_area;
}

namespace {

template <class Field, class Value>
Value bilinear_impl(const Field& field, double x, double y) {
    const GridSpec& spec = field.spec;
    const double u = (x + spec.half_extent_x) / spec.hx() - 0.5;
    const double v = (y + spec.half_extent_y) / spec.hy() - 0.5;
    if (u < 0.0 || v < 0.0 || u > spec.nx - 1.0 || v > spec.ny - 1.0)
        throw ConfigError("bilinear: point outside interpolation support");
    int ix0 = static_cast<int>(std::floor(u));
    int iy0 = static_cast<int>(std::floor(v));
    ix0 = std::min(ix0, spec.nx - 2);
    iy0 = std::min(iy0, spec.ny - 2);
    const double fx = u - ix0;
    const double fy = v - iy0;
    const Value v00 = field.at(ix0, iy0), v10 = field.at(ix0 + 1, iy0);
    const Value v01 = field.at(ix0, iy0 + 1), v11 = field.at(ix0 + 1, iy0 + 1);
    return v00 * ((1.0 - fx) * (1.0 - fy)) + v10 * (fx * (1.0 - fy)) +
           v01 * ((1.0 - fx) * fy) + v11 * (fx * fy);
}

}  // namespace

double bilinear(const ScalarField& field, double x, double y) {
    return bilinear_impl<ScalarField, double>(field, x, y);
}

Complex bilinear(const ComplexField& field, double x, double y) {
    return bilinear_impl<ComplexField, Complex>(field, x, y);
}

int phase_winding(const ComplexField& field, Complex center, double radius,
                  double min_amplitude) {
    const GridSpec& spec = field.spec;
    if (!(radius > 0.0)) throw ConfigError("phase_winding: radius must be positive");
    const double margin_x = spec.hx();
    const double margin_y = spec.hy();
    if (std::abs(center.real()) + radius > spec.half_extent_x - margin_x ||
        std::abs(center.imag()) + radius > spec.half_extent_y - margin_y)
        throw ConfigError("phase_winding: circle does not lie inside the grid");

    const double h = std::min(spec.hx(), spec.hy());
    const int samples = std::max(256, 8 * static_cast<int>(std::ceil(2.0 * M_PI * radius / h)));
    double total = 0.0;
    double prev_arg = 0.0;
    for (int k = 0; k <= samples; ++k) {
        const double theta = 2.0 * M_PI * k / samples;
        const Complex z = bilinear(field, center.real() + radius * std::cos(theta),
                                   center.imag() + radius * std::sin(theta));
        if (std::abs(z) < min_amplitude)
            throw std::domain_error("phase_winding: amplitude below threshold on circle");
        const double arg = std::arg(z);
        if (k > 0) {
            double d = arg - prev_arg;
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d < -M_PI) d += 2.0 * M_PI;
            total += d;
        }
        prev_arg = arg;
    }
    return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

double masked_median_abs(const ScalarField& field, const GridMask& mask) {
    if (!(field.spec == mask.spec)) throw ConfigError("masked_median_abs: grid mismatch");
    std::vector<double> vals;
    vals.reserve(field.values.size());
    for (std::size_t i = 0; i < field.values.size(); ++i)
        if (mask.on[i]) vals.push_back(std::abs(field.values[i]));
    if (vals.empty()) throw ConfigError("masked_median_abs: empty mask");
    const std::size_t mid = vals.size() / 2;
    std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
    return vals[mid];
}

double masked_max_abs(const ScalarField& field, const GridMask& mask) {
    if (!(field.spec == mask.spec)) throw ConfigError("masked_max_abs: grid mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < field.values.size(); ++i)
        if (mask.on[i]) m = std::max(m, std::abs(field.values[i]));
    return m;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view tok, const std::filesystem::path& path) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw IoError("bad numeric token in " + path.string());
    return v;
}

void write_header(std::ofstream& out, const GridSpec& spec, const char* kind) {
    out << "# vsense-field v1 kind=" << kind << " nx=" << spec.nx << " ny=" << spec.ny
        << " half_extent_x=" << format_double(spec.half_extent_x)
        << " half_extent_y=" << format_double(spec.half_extent_y) << "\n";
}

GridSpec parse_header(const std::string& line, const std::string& expect_kind,
                      const std::filesystem::path& path) {
    std::istringstream in(line);
    std::string hash, tag, kind_kv;
    in >> hash >> tag >> kind_kv;
    if (hash != "#" || tag != "vsense-field" || kind_kv != "v1")
        throw IoError("not a vsense field CSV: " + path.string());
    std::string kv;
    std::string kind;
    double lx = 0, ly = 0;
    int nx = 0, ny = 0;
    while (in >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw IoError("malformed field header in " + path.string());
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "kind") kind = val;
        else if (key == "nx") nx = std::stoi(val);
        else if (key == "ny") ny = std::stoi(val);
        else if (key == "half_extent_x") lx = std::stod(val);
        else if (key == "half_extent_y") ly = std::stod(val);
    }
    if (kind != expect_kind)
        throw IoError("field kind mismatch in " + path.string() + " (want " + expect_kind + ")");
    return GridSpec(lx, ly, nx, ny);
}

std::vector<std::string_view> split_csv(const std::string& line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.emplace_back(line.data() + start, line.size() - start);
            break;
        }
        out.emplace_back(line.data() + start, comma - start);
        start = comma + 1;
    }
    return out;
}

}  // namespace

void write_csv(const ScalarField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_header(out, field.spec, "scalar");
    for (int iy = 0; iy < field.spec.ny; ++iy) {
        for (int ix = 0; ix < field.spec.nx; ++ix) {
            if (ix) out << ',';
            out << format_double(field.at(ix, iy));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_csv(const ComplexField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_header(out, field.spec, "complex");
    for (int iy = 0; iy < field.spec.ny; ++iy) {
        for (int ix = 0; ix < field.spec.nx; ++ix) {
            if (ix) out << ',';
            const Complex v = field.at(ix, iy);
            out << format_double(v.real()) << ',' << format_double(v.imag());
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

ScalarField read_scalar_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
    const GridSpec spec = parse_header(line, "scalar", path);
    ScalarField field(spec);
    for (int iy = 0; iy < spec.ny; ++iy) {
        if (!std::getline(in, line)) throw IoError("truncated field CSV: " + path.string());
        const auto toks = split_csv(line);
        if (static_cast<int>(toks.size()) != spec.nx)
            throw IoError("wrong column count in " + path.string());
        for (int ix = 0; ix < spec.nx; ++ix) field.at(ix, iy) = parse_double(toks[ix], path);
    }
    return field;
}

ComplexField read_complex_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
    const GridSpec spec = parse_header(line, "complex", path);
    ComplexField field(spec);
    for (int iy = 0; iy < spec.ny; ++iy) {
        if (!std::getline(in, line)) throw IoError("truncated field CSV: " + path.string());
        const auto toks = split_csv(line);
        if (static_cast<int>(toks.size()) != 2 * spec.nx)
            throw IoError("wrong column count in " + path.string());
        for (int ix = 0; ix < spec.nx; ++ix)
            field.at(ix, iy) = Complex(parse_double(toks[2 * ix], path),
                                       parse_double(toks[2 * ix + 1], path));
    }
    return field;
}

}  // namespace vsense
