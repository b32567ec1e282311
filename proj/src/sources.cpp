#include "sgi/sources.hpp"

#include <fmt/format.h>

#include "sgi/axial.hpp"
#include "sgi/errors.hpp"
#include "sgi/observables.hpp"

namespace sgi {

using Eigen::Vector3d;

void UniformFieldSource::sample(const SpinorField& psi, double, bool, PotentialSample& out) {
  const Eigen::Index n = psi.up.size();
  out.kind = PotentialSample::Kind::spin;
  out.bx.setConstant(n, b_.x());
  out.by.setConstant(n, b_.y());
  out.bz.setConstant(n, b_.z());
  out.g.resize(0);
}

void HarmonicSource::sample(const SpinorField& psi, double, bool with_gradient,
                            PotentialSample& out) {
  const Grid& g = psi.grid;
  const int nz = g.points(2);
  out.kind = PotentialSample::Kind::scalar;
  out.scalar.resize(g.size());
  out.g.resize(with_gradient ? g.size() : 0);
  const double k = mass_ * omega_ * omega_;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double z = g.coord(2, int(i % nz)) - z0_;
    out.scalar[i] = 0.5 * k * z * z;
    if (with_gradient) out.g[i] = (k * z) * (k * z);
  }
}

AxialLineSource::AxialLineSource(const FieldModel& model, const PhysParams& p, const Grid& grid)
    : model_(model), p_(p) {
  if (grid.dims() != 1) throw GeometryError("the simplified model runs on a 1D grid");
  const int nz = grid.points(2);
  const auto& ker = model.kernel();
  const Eigen::Index nodes = ker.k.size();
  first_.resize(nz, nodes);
  second_.resize(nz, nodes);
  for (int j = 0; j < nz; ++j) {
    const double z = grid.coord(2, j);
    if (!(std::abs(z) < model.a())) {
      throw GeometryError(fmt::format(
          "1D grid point z = {:g} lies outside the charge lines (a = {:g}); shrink the grid",
          z, model.a()));
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nz; ++j) {
    const double z = grid.coord(2, j);
    for (Eigen::Index i = 0; i < nodes; ++i) {
      const auto [d1, d2] = axial_line_derivatives(ker.k[i], model.a(), model.second_charge(), z);
      first_(j, i) = ker.w[i] * d1;
      second_(j, i) = ker.w[i] * d2;
    }
  }
}

void AxialLineSource::sample(const SpinorField&, double t, bool with_gradient,
                             PotentialSample& out) {
  const double y = p_.y_start + p_.speed() * t;
  const auto& ker = model_.kernel();
  const Eigen::VectorXd c = (ker.k * y).cos().matrix();
  const double mf = p_.moment * model_.f();
  out.kind = PotentialSample::Kind::spin_z;
  out.bz = mf * (model_.bias() - (first_ * c).array());
  if (with_gradient) {
    out.g = (mf * (second_ * c).array()).square();
  } else {
    out.g.resize(0);
  }
}

PatchSource::PatchSource(const FieldModel& model, const PhysParams& p, double radius)
    : model_(model), p_(p), radius_(radius) {}

void PatchSource::sample(const SpinorField& psi, double t, bool with_gradient,
                         PotentialSample& out) {
  const Grid& g = psi.grid;
  if (g.dims() != 3) throw GeometryError("patch sampling needs a 3D grid");
  const ComponentCentroids cc = component_centroids(psi);
  const double total = cc.weight_up + cc.weight_down;
  const double y_frame = p_.y_start + p_.speed() * t;

  std::vector<Vector3d> centres;
  if (cc.weight_up > 1e-12 * total) centres.push_back(cc.up);
  if (cc.weight_down > 1e-12 * total) centres.push_back(cc.down);
  if (centres.empty()) throw DegenerateStateError("patch sampling of a zero-norm state");
  patches_.clear();
  for (const Vector3d& c : centres) {
    patches_.push_back(make_patch(Vector3d(c.x(), y_frame + c.y(), c.z()), model_, radius_));
  }

  const int nx = g.points(0), ny = g.points(1), nz = g.points(2);
  out.kind = PotentialSample::Kind::spin;
  out.bx.resize(g.size());
  out.by.resize(g.size());
  out.bz.resize(g.size());
  out.g.resize(with_gradient ? g.size() : 0);
  const double mu = p_.moment;
  const int np = int(patches_.size());
#pragma omp parallel for schedule(static)
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        const Vector3d r(g.coord(0, ix), g.coord(1, iy), g.coord(2, iz));
        int best = 0;
        Vector3d d = r - centres[0];
        for (int k = 1; k < np; ++k) {
          const Vector3d dk = r - centres[k];
          if (dk.squaredNorm() < d.squaredNorm()) {
            d = dk;
            best = k;
          }
        }
        const QuadraticFieldPatch& patch = patches_[best];
        const Vector3d b = mu * patch.eval(d);
        const std::size_t i = g.index(ix, iy, iz);
        out.bx[i] = b.x();
        out.by[i] = b.y();
        out.bz[i] = b.z();
        if (with_gradient) out.g[i] = mu * mu * patch.jacobian_at(d).squaredNorm();
      }
    }
  }
}

void ExactFieldSource::sample(const SpinorField& psi, double t, bool with_gradient,
                              PotentialSample& out) {
  const Grid& g = psi.grid;
  if (g.dims() != 3) throw GeometryError("exact field sampling needs a 3D grid");
  const double y_frame = p_.y_start + p_.speed() * t;
  const int nx = g.points(0), ny = g.points(1), nz = g.points(2);
  out.kind = PotentialSample::Kind::spin;
  out.bx.resize(g.size());
  out.by.resize(g.size());
  out.bz.resize(g.size());
  out.g.resize(with_gradient ? g.size() : 0);
  const double mu = p_.moment;
#pragma omp parallel for schedule(static)
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        const Vector3d r(g.coord(0, ix), y_frame + g.coord(1, iy), g.coord(2, iz));
        const std::size_t i = g.index(ix, iy, iz);
        Vector3d b;
        if (with_gradient) {
          const FieldDerivatives fd = field_derivatives(r, model_);
          b = fd.value;
          out.g[i] = mu * mu * fd.jacobian.squaredNorm();
        } else {
          b = field_at(r, model_);
        }
        out.bx[i] = mu * b.x();
        out.by[i] = mu * b.y();
        out.bz[i] = mu * b.z();
      }
    }
  }
}

}  // namespace sgi
