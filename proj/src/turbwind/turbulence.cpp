#include "windsteer/turbwind/turbulence.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "windsteer/errors.hpp"

namespace windsteer::turbwind {

namespace {

using Complex = std::complex<double>;

double wavenumber(int i, int n, double d) {
  const int f = (i <= n / 2) ? i : i - n;
  return 2.0 * kPi * f / (n * d);
}

// In-place transform of a 3-D complex array along one axis.
void transform_axis(std::vector<Complex>& data, int nx, int ny, int nz, int axis,
                    bool inverse, Eigen::FFT<double>& fft) {
  const int n = axis == 0 ? nx : axis == 1 ? ny : nz;
  const std::size_t stride = axis == 0 ? static_cast<std::size_t>(ny) * nz
                             : axis == 1 ? static_cast<std::size_t>(nz)
                                         : 1;
  std::vector<Complex> line(n), out(n);
  const int na = axis == 0 ? ny : nx;
  const int nb = axis == 2 ? ny : nz;
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      std::size_t base = 0;
      if (axis == 0) base = static_cast<std::size_t>(a) * nz + b;
      if (axis == 1) base = static_cast<std::size_t>(a) * ny * nz + b;
      if (axis == 2) base = (static_cast<std::size_t>(a) * ny + b) * nz;
      for (int i = 0; i < n; ++i) line[i] = data[base + i * stride];
      if (inverse)
        fft.inv(out, line);
      else
        fft.fwd(out, line);
      for (int i = 0; i < n; ++i) data[base + i * stride] = out[i];
    }
  }
}

void transform3d(std::vector<Complex>& data, int nx, int ny, int nz,
                 bool inverse) {
  Eigen::FFT<double> fft;
  for (int axis = 0; axis < 3; ++axis)
    transform_axis(data, nx, ny, nz, axis, inverse, fft);
}

std::vector<float> synthesize_component(std::uint64_t id, int component,
                                        double length_scale, double sigma,
                                        const LatticeSpec& dims) {
  const int nx = dims.nx, ny = dims.ny, nz = dims.nz;
  const std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
  std::vector<float> result(n, 0.0f);
  if (sigma == 0.0) return result;

  std::seed_seq seq{static_cast<std::uint32_t>(id & 0xffffffffu),
                    static_cast<std::uint32_t>(id >> 32),
                    static_cast<std::uint32_t>(component), 0x7b0cu};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Complex> field(n);
  for (auto& c : field) c = Complex(normal(rng), 0.0);

  transform3d(field, nx, ny, nz, /*inverse=*/false);

  const double dx = dims.dx();
  for (int ix = 0; ix < nx; ++ix) {
    const double kx = wavenumber(ix, nx, dx);
    for (int iy = 0; iy < ny; ++iy) {
      const double ky = wavenumber(iy, ny, dims.dy);
      for (int iz = 0; iz < nz; ++iz) {
        const double kz = wavenumber(iz, nz, dims.dz);
        const double k2 = kx * kx + ky * ky + kz * kz;
        const double gain =
            std::pow(1.0 + length_scale * length_scale * k2, -11.0 / 12.0);
        field[(static_cast<std::size_t>(ix) * ny + iy) * nz + iz] *= gain;
      }
    }
  }
  field[0] = Complex(0.0, 0.0);

  transform3d(field, nx, ny, nz, /*inverse=*/true);

  double mean = 0.0;
  for (const auto& c : field) mean += c.real();
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& c : field) var += (c.real() - mean) * (c.real() - mean);
  var /= static_cast<double>(n);
  const double scale = var > 0.0 ? sigma / std::sqrt(var) : 0.0;
  for (std::size_t i = 0; i < n; ++i)
    result[i] = static_cast<float>((field[i].real() - mean) * scale);
  return result;
}

double wrap(double value, double period) {
  double r = std::fmod(value, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

struct Stencil {
  int i0, i1;
  double w;
};

Stencil stencil(double coord, double spacing, int n) {
  const double pos = wrap(coord, spacing * n) / spacing;
  int i0 = static_cast<int>(std::floor(pos));
  double w = pos - i0;
  if (i0 >= n) {
    i0 = 0;
    w = 0.0;
  }
  return {i0, (i0 + 1) % n, w};
}

double interpolate(const TurbulenceBox& box, const std::vector<float>& grid,
                   const Stencil& sx, const Stencil& sy, const Stencil& sz) {
  auto at = [&](int ix, int iy, int iz) {
    return static_cast<double>(grid[box.index(ix, iy, iz)]);
  };
  auto lerp_z = [&](int ix, int iy) {
    return (1.0 - sz.w) * at(ix, iy, sz.i0) + sz.w * at(ix, iy, sz.i1);
  };
  auto lerp_yz = [&](int ix) {
    return (1.0 - sy.w) * lerp_z(ix, sy.i0) + sy.w * lerp_z(ix, sy.i1);
  };
  return (1.0 - sx.w) * lerp_yz(sx.i0) + sx.w * lerp_yz(sx.i1);
}

}  // namespace

void InflowSpec::validate() const {
  if (!(ws > 0.0)) throw ConfigError("[inflow].ws", "must be > 0");
  if (!(wd >= 0.0 && wd < 360.0))
    throw ConfigError("[inflow].wd", "must lie in [0, 360)");
  if (!(ti >= 0.0 && ti < 1.0))
    throw ConfigError("[inflow].ti", "must lie in [0, 1)");
}

double required_box_length(const FarmLayout& layout, const InflowSpec& spec) {
  double extent = 0.0;
  if (layout.n_turbines() > 0) {
    const auto x = layout.positions.row(0);
    extent = x.maxCoeff() - x.minCoeff();
  }
  return extent + 600.0 * spec.ws;
}

TurbulenceBox generate_turbulence_box(std::uint64_t id, const InflowSpec& spec,
                                      const LatticeSpec& dims,
                                      const FarmLayout& layout,
                                      const SpectrumParams& spectrum) {
  spec.validate();
  if (dims.nx < 2 || dims.ny < 2 || dims.nz < 2)
    throw ConfigError("[turbulence].dims", "each lattice dimension must be >= 2");
  const double needed = required_box_length(layout, spec);
  if (dims.length_x < needed) {
    std::ostringstream msg;
    msg << "box length " << dims.length_x << " m is below the required minimum "
        << needed << " m (farm extent + 600 s of advection)";
    throw ConfigError("[turbulence].length_x", msg.str());
  }

  TurbulenceBox box;
  box.id = id;
  box.nx = dims.nx;
  box.ny = dims.ny;
  box.nz = dims.nz;
  box.dx = dims.dx();
  box.dy = dims.dy;
  box.dz = dims.dz;
  box.sigma_u = spec.ti * spec.ws;
  for (int c = 0; c < 3; ++c) {
    box.grid[c] = synthesize_component(
        id, c, spectrum.length_ratio[c] * spectrum.scale_parameter,
        spectrum.sigma_ratio[c] * box.sigma_u, dims);
  }
  return box;
}

TurbulenceBox quiescent_box(const LatticeSpec& dims, std::uint64_t id) {
  TurbulenceBox box;
  box.id = id;
  box.nx = dims.nx;
  box.ny = dims.ny;
  box.nz = dims.nz;
  box.dx = dims.dx();
  box.dy = dims.dy;
  box.dz = dims.dz;
  for (auto& g : box.grid) g.assign(box.size(), 0.0f);
  return box;
}

Eigen::Vector3d freestream_at(const TurbulenceBox& box, const InflowSpec& spec,
                              double t, const Eigen::Vector3d& point) {
  const Stencil sx = stencil(point.x() - spec.ws * t, box.dx, box.nx);
  const Stencil sy = stencil(point.y() - box.y0(), box.dy, box.ny);
  const Stencil sz = stencil(point.z(), box.dz, box.nz);
  return {spec.ws + interpolate(box, box.grid[0], sx, sy, sz),
          interpolate(box, box.grid[1], sx, sy, sz),
          interpolate(box, box.grid[2], sx, sy, sz)};
}

double freestream_u_at(const TurbulenceBox& box, const InflowSpec& spec,
                       double t, const Eigen::Vector3d& point) {
  const Stencil sx = stencil(point.x() - spec.ws * t, box.dx, box.nx);
  const Stencil sy = stencil(point.y() - box.y0(), box.dy, box.ny);
  const Stencil sz = stencil(point.z(), box.dz, box.nz);
  return spec.ws + interpolate(box, box.grid[0], sx, sy, sz);
}

}  // namespace windsteer::turbwind
