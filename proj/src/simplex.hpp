#pragma once

// Dense phase-one simplex for linear feasibility { w >= 0 : A w = b }, b >= 0.

#include <vector>

#include <Eigen/Dense>

namespace qfep::detail {

struct PhaseOneResult {
    double infeasibility = 0.0;  // optimal sum of artificial variables
    Eigen::VectorXd primal;      // w
    // Duals of the phase-one problem. At optimality y.A_j <= 0 for every column
    // and y.b equals `infeasibility`; a positive value is a Farkas certificate.
    Eigen::VectorXd dual;
    int iterations = 0;
};

PhaseOneResult phase_one(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, double eps = 1e-12);

}  // namespace qfep::detail
