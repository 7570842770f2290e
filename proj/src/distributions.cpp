#include "tsf/distributions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace tsf::dist {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}

double normal_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double normal_sf(double x) { return boost::math::cdf(boost::math::complement(kStdNormal, x)); }

double normal_quantile(double p) { return boost::math::quantile(kStdNormal, p); }

double chi2_sf(double x, double df) {
    if (x <= 0.0) {
        return 1.0;
    }
    const boost::math::chi_squared_distribution<double> chi2(df);
    return boost::math::cdf(boost::math::complement(chi2, x));
}

}  // namespace tsf::dist
