#pragma once

#include <Eigen/Dense>

#include "rtm/gates.hpp"

namespace rtm {

double critical_p(int d);

// c = d * (two-replica dimer tensor contracted with <○| on the left leg and <□| on the right leg).
double c_constant(const Vec& psi0, int d);

// Averaged dimer in the {○/d, ●/d} basis; depends on the state only through c.
Eigen::Matrix2d averaged_dimer(int d, double c);

// Network with |A| = 2 t1 open legs above t0 contracted ones, i.e. t = 2 t1 + t0 - 1 rows.
// The k identity legs sit next to A' on the top-owning side.
struct AveragedNetworkParams {
    int d = 2;
    double p = 0.75;
    int t0 = 0;
    int t1 = 0;
    int k = 0;
    double c = 1.0;

    int legs_A() const { return 2 * t1; }
    int legs_A_prime() const { return t1; }
    int rows() const { return 2 * t1 + t0 - 1; }
    void validate() const;
};

double averaged_Ak_contract(const AveragedNetworkParams& prm);

double recursion_B(int d, double c, int x);
double recursion_C(int d, double c, int t0, int y);
double closed_form_EAk(const AveragedNetworkParams& prm);

struct PkPrediction {
    double p0 = 1.0;
    double pk = 0.0;  // every k = 1..t1
    // pk = prefactor * exp(-rate * t0)
    double rate = 0.0;
    double prefactor = 0.0;
};

PkPrediction predicted_pk_critical(const AveragedNetworkParams& prm);

}  // namespace rtm
