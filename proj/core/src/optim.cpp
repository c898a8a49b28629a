#include "hdsg/optim.hpp"

#include <algorithm>
#include <vector>

namespace hdsg {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             Eigen::VectorXd x0, double step, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, int max_evals) {
    const int n = static_cast<int>(x0.size());
    int evals = 0;
    auto clamp = [&](Eigen::VectorXd x) {
        for (int i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
        return x;
    };
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        return f(x);
    };

    std::vector<Eigen::VectorXd> xs;
    std::vector<double> fs;
    xs.push_back(clamp(std::move(x0)));
    fs.push_back(eval(xs[0]));
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v = xs[0];
        v[i] = std::clamp(v[i] + step, lo[i], hi[i]);
        if (v[i] == xs[0][i]) v[i] = std::clamp(xs[0][i] - step, lo[i], hi[i]);
        xs.push_back(v);
        fs.push_back(eval(v));
    }

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<int> ord(n + 1);
    while (evals < max_evals) {
        for (int i = 0; i <= n; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = ord[0], worst = ord[n], second = ord[n - 1];

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += xs[i];
        centroid /= static_cast<double>(n);

        if ((xs[worst] - xs[best]).cwiseAbs().maxCoeff() < 1e-10) break;

        Eigen::VectorXd xr = clamp(centroid + alpha * (centroid - xs[worst]));
        const double fr = eval(xr);
        if (fr < fs[best]) {
            Eigen::VectorXd xe = clamp(centroid + gamma * (centroid - xs[worst]));
            const double fe = eval(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            Eigen::VectorXd xc = clamp(centroid + rho * (xs[worst] - centroid));
            const double fc = eval(xc);
            if (fc < fs[worst]) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    xs[i] = clamp(xs[best] + sigma * (xs[i] - xs[best]));
                    fs[i] = eval(xs[i]);
                    if (evals >= max_evals) break;
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], fs[best], evals};
}

} // namespace hdsg
