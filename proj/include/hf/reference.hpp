// Plain serial reference implementations, kept for testing and as the
// benchmark baseline. Everything here is written as literal index-wrapped
// double loops, independent of the ghost-view/operator machinery in the
// optimized path. Periodic grids only.
#pragma once

#include "hf/grid.hpp"

namespace hf::ref {

CellField laplacian(const CellField& phi);
CellField grad_x(const CellField& phi);
CellField grad_y(const CellField& phi);
CellField divergence(const CellField& u, const CellField& v);
CellField vorticity(const CellField& u, const CellField& v);
double inner(const CellField& a, const CellField& b);

struct HydroCoeffs {
    const CellField* rho_k;
    const CellField* u_k;
    const CellField* v_k;
    double s;
    double gamma;
};

// N(g) for the nonlocal model, unknowns (rho, u, v).
void apply_n_cdft(const HydroCoeffs& c, double je_mass, const CellField& rho,
                  const CellField& u, const CellField& v, CellField& n1, CellField& n2,
                  CellField& n3);

// S for the nonlocal model; conv_rho_k = J * rho^k.
void source_cdft(const HydroCoeffs& c, double je_mass, const CellField& conv_rho_k,
                 CellField& s1, CellField& s2, CellField& s3);

// N(g) for the local model, unknowns (rho, u, v, mu, kappa).
void apply_n_pfc(const HydroCoeffs& c, double alpha, const CellField& rho, const CellField& u,
                 const CellField& v, const CellField& mu, const CellField& kappa, CellField& n1,
                 CellField& n2, CellField& n3, CellField& n4, CellField& n5);

void source_pfc(const HydroCoeffs& c, CellField& s1, CellField& s2, CellField& s3,
                CellField& s4, CellField& s5);

}  // namespace hf::ref
