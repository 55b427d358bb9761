#include "jostline/io.hpp"

#include <array>
#include <charconv>
#include <ostream>

#include <json.hpp>

namespace jostline {

namespace {

using nlohmann::ordered_json;

ordered_json complex_matrix_json(const CMatrix& m) {
  ordered_json re = ordered_json::array();
  ordered_json im = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json re_row = ordered_json::array();
    ordered_json im_row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return ordered_json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ordered_json complex_vector_json(const CVector& v) {
  ordered_json re = ordered_json::array();
  ordered_json im = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return ordered_json{{"re", std::move(re)}, {"im", std::move(im)}};
}

void write_matrix_rows(std::ostream& os, const std::string& prefix,
                       const std::string& name, const CMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << prefix << name << ',' << r << ',' << c << ','
         << format_real(m(r, c).real()) << ','
         << format_real(m(r, c).imag()) << '\n';
}

struct NamedBlock {
  const char* name;
  const CMatrix* m;
};

std::vector<NamedBlock> scattering_blocks(const ScatteringSet& ss) {
  std::vector<NamedBlock> blocks{
      {"t1", &ss.t1},           {"r1", &ss.r1},
      {"t2", &ss.t2},           {"r2", &ss.r2},
      {"t1_tilde", &ss.t1_tilde}, {"r1_tilde", &ss.r1_tilde},
      {"t2_tilde", &ss.t2_tilde}, {"r2_tilde", &ss.r2_tilde},
  };
  if (ss.proj.size() > 0) blocks.push_back({"proj", &ss.proj});
  return blocks;
}

void classification_side(std::ostream& os, const char* side,
                         const std::vector<int>& open,
                         const std::vector<int>& closed,
                         const Vector& kappa_open,
                         const Vector& kappa_closed, int channels) {
  for (int s = 0; s < channels; ++s) {
    for (std::size_t i = 0; i < open.size(); ++i)
      if (open[i] == s)
        os << side << ',' << s << ",open," << format_real(kappa_open[static_cast<Eigen::Index>(i)])
           << '\n';
    for (std::size_t i = 0; i < closed.size(); ++i)
      if (closed[i] == s)
        os << side << ',' << s << ",closed,"
           << format_real(kappa_closed[static_cast<Eigen::Index>(i)]) << '\n';
  }
}

ordered_json classification_side_json(const std::vector<int>& open,
                                      const std::vector<int>& closed,
                                      const Vector& kappa_open,
                                      const Vector& kappa_closed,
                                      int channels) {
  ordered_json out = ordered_json::array();
  for (int s = 0; s < channels; ++s) {
    for (std::size_t i = 0; i < open.size(); ++i)
      if (open[i] == s)
        out.push_back({{"channel", s},
                       {"state", "open"},
                       {"kappa", kappa_open[static_cast<Eigen::Index>(i)]}});
    for (std::size_t i = 0; i < closed.size(); ++i)
      if (closed[i] == s)
        out.push_back({{"channel", s},
                       {"state", "closed"},
                       {"kappa", kappa_closed[static_cast<Eigen::Index>(i)]}});
  }
  return out;
}

}  // namespace

std::string format_real(Real x) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void write_field_csv(std::ostream& os, const JostField& field) {
  os << "z,family,column,component,re_u,im_u,re_p,im_p\n";
  const int n = field.channels();
  for (int fam = 0; fam < 4; ++fam) {
    const char* name = family_name(static_cast<JostFamily>(fam));
    for (std::size_t i = 0; i < field.z.size(); ++i) {
      const CMatrix& u = field.u[fam][i];
      const CMatrix& p = field.p[fam][i];
      for (int s = 0; s < n; ++s)
        for (int c = 0; c < n; ++c)
          os << format_real(field.z[i]) << ',' << name << ',' << s << ','
             << c << ',' << format_real(u(c, s).real()) << ','
             << format_real(u(c, s).imag()) << ','
             << format_real(p(c, s).real()) << ','
             << format_real(p(c, s).imag()) << '\n';
    }
  }
}

void write_transition_csv(std::ostream& os, const TransitionSet& ts) {
  os << "matrix,row,col,re,im\n";
  write_matrix_rows(os, "", "phi_plus", ts.phi_plus);
  write_matrix_rows(os, "", "psi_plus", ts.psi_plus);
  write_matrix_rows(os, "", "phi_minus", ts.phi_minus);
  write_matrix_rows(os, "", "psi_minus", ts.psi_minus);
}

std::string transition_to_json(const TransitionSet& ts) {
  ordered_json doc{
      {"lambda",
       {{"re", ts.point.lambda.real()}, {"im", ts.point.lambda.imag()}}},
      {"phi_plus", complex_matrix_json(ts.phi_plus)},
      {"psi_plus", complex_matrix_json(ts.psi_plus)},
      {"phi_minus", complex_matrix_json(ts.phi_minus)},
      {"psi_minus", complex_matrix_json(ts.psi_minus)},
      {"expansion_residual", ts.expansion_residual},
  };
  return doc.dump(2) + "\n";
}

void write_smatrix_csv(
    std::ostream& os,
    const std::vector<std::pair<Real, ScatteringSet>>& rows) {
  os << "lambda,block,row,col,re,im\n";
  for (const auto& [lambda, ss] : rows) {
    const std::string prefix = format_real(lambda) + ",";
    for (const NamedBlock& b : scattering_blocks(ss))
      write_matrix_rows(os, prefix, b.name, *b.m);
  }
}

std::string smatrix_to_json(
    const std::vector<std::pair<Real, ScatteringSet>>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& [lambda, ss] : rows) {
    ordered_json blocks;
    for (const NamedBlock& b : scattering_blocks(ss))
      blocks[b.name] = complex_matrix_json(*b.m);
    arr.push_back(ordered_json{{"lambda", lambda},
                               {"sides_swapped", ss.sides_swapped},
                               {"proj_rank", ss.proj_rank},
                               {"blocks", std::move(blocks)}});
  }
  return arr.dump(2) + "\n";
}

void write_classification_csv(std::ostream& os,
                              const ChannelClassification& cls) {
  const int n = cls.l_o + cls.l_c;
  os << "side,channel,state,kappa\n";
  classification_side(os, "left", cls.open_left, cls.closed_left,
                      cls.kappa_open_left, cls.kappa_closed_left, n);
  classification_side(os, "right", cls.open_right, cls.closed_right,
                      cls.kappa_open_right, cls.kappa_closed_right, n);
}

std::string classification_to_json(const ChannelClassification& cls) {
  const int n = cls.l_o + cls.l_c;
  ordered_json doc{
      {"lambda", cls.lambda},
      {"left", classification_side_json(cls.open_left, cls.closed_left,
                                        cls.kappa_open_left,
                                        cls.kappa_closed_left, n)},
      {"right", classification_side_json(cls.open_right, cls.closed_right,
                                         cls.kappa_open_right,
                                         cls.kappa_closed_right, n)},
  };
  return doc.dump(2) + "\n";
}

void write_residuals_csv(
    std::ostream& os,
    const std::vector<std::pair<Real, std::vector<ResidualRecord>>>& rows) {
  os << "lambda,check_name,residual\n";
  for (const auto& [lambda, records] : rows)
    for (const ResidualRecord& r : records)
      os << format_real(lambda) << ',' << r.name << ','
         << format_real(r.value) << '\n';
}

std::string residuals_to_json(
    const std::vector<std::pair<Real, std::vector<ResidualRecord>>>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& [lambda, records] : rows) {
    ordered_json checks = ordered_json::array();
    for (const ResidualRecord& r : records)
      checks.push_back({{"name", r.name}, {"value", r.value}});
    arr.push_back(
        ordered_json{{"lambda", lambda}, {"checks", std::move(checks)}});
  }
  return arr.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "lambda,t1_tilde_sq,r1_tilde_sq,unitarity\n";
  for (const SweepRow& r : rows)
    os << format_real(r.lambda) << ',' << format_real(r.t1_tilde_sq) << ','
       << format_real(r.r1_tilde_sq) << ',' << format_real(r.unitarity)
       << '\n';
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const SweepRow& r : rows)
    arr.push_back(ordered_json{{"lambda", r.lambda},
                               {"t1_tilde_sq", r.t1_tilde_sq},
                               {"r1_tilde_sq", r.r1_tilde_sq},
                               {"unitarity", r.unitarity}});
  return arr.dump(2) + "\n";
}

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& trace) {
  os << "lambda,re_D,im_D,abs_D\n";
  for (const ScanPoint& p : trace)
    os << format_real(p.lambda) << ',' << format_real(p.d.real()) << ','
       << format_real(p.d.imag()) << ',' << format_real(std::abs(p.d))
       << '\n';
}

std::string bound_states_to_json(const std::vector<BoundState>& states) {
  ordered_json arr = ordered_json::array();
  for (const BoundState& bs : states) {
    ordered_json wave_u = ordered_json::array();
    ordered_json wave_p = ordered_json::array();
    const int n = static_cast<int>(bs.v.size());
    for (int c = 0; c < n; ++c) {
      ordered_json u_re = ordered_json::array();
      ordered_json u_im = ordered_json::array();
      ordered_json p_re = ordered_json::array();
      ordered_json p_im = ordered_json::array();
      for (std::size_t i = 0; i < bs.z.size(); ++i) {
        u_re.push_back(bs.wave_u[i][c].real());
        u_im.push_back(bs.wave_u[i][c].imag());
        p_re.push_back(bs.wave_p[i][c].real());
        p_im.push_back(bs.wave_p[i][c].imag());
      }
      wave_u.push_back(
          ordered_json{{"re", std::move(u_re)}, {"im", std::move(u_im)}});
      wave_p.push_back(
          ordered_json{{"re", std::move(p_re)}, {"im", std::move(p_im)}});
    }

    ordered_json doc{
        {"lambda_b", bs.lambda_b},
        {"near_threshold", bs.near_threshold},
        {"multiple", bs.multiple},
        {"v", complex_vector_json(bs.v)},
        {"w", complex_vector_json(bs.w)},
        {"residuals",
         {{"det", bs.det_residual},
          {"null_v", bs.null_residual_v},
          {"null_w", bs.null_residual_w},
          {"open_v", bs.open_norm_v},
          {"open_w", bs.open_norm_w},
          {"pairing", bs.pairing_residual},
          {"expansion", bs.expansion_residual}}},
        {"pairing_scale",
         {{"re", bs.pairing_scale.real()}, {"im", bs.pairing_scale.imag()}}},
        {"decay",
         {{"left", bs.decay_left},
          {"right", bs.decay_right},
          {"kappa_left", bs.kappa_left},
          {"kappa_right", bs.kappa_right}}},
        {"z", bs.z},
        {"u", std::move(wave_u)},
        {"p", std::move(wave_p)},
    };
    if (bs.multiple) {
      doc["v2"] = complex_vector_json(bs.v2);
      doc["w2"] = complex_vector_json(bs.w2);
    }
    arr.push_back(std::move(doc));
  }
  return arr.dump(2) + "\n";
}

void write_asymptote_csv(std::ostream& os,
                         const std::vector<AsymptoteRecord>& rows) {
  os << "lambda,abs_det_S_tilde_minus_1,phi_dev\n";
  for (const AsymptoteRecord& r : rows)
    os << format_real(r.lambda) << ',' << format_real(r.det_gap) << ','
       << format_real(r.phi_dev) << '\n';
}

std::string asymptote_to_json(const std::vector<AsymptoteRecord>& rows) {
  ordered_json arr = ordered_json::array();
  for (const AsymptoteRecord& r : rows)
    arr.push_back(ordered_json{{"lambda", r.lambda},
                               {"abs_det_S_tilde_minus_1", r.det_gap},
                               {"phi_dev", r.phi_dev}});
  return arr.dump(2) + "\n";
}

}  // namespace jostline
