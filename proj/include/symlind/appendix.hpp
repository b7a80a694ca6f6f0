#pragma once

// Collective one-body superoperators of a three-level system written as
// bosonized generators of sl(9).
//
// Each row states  sum_mu U^(mu) rho V^(mu) = sum_k coeff_k A_k rho.
// Operator labels: "I" identity, "ab=" sigma^ab with sign s, "ab~" with sign
// -s, "3ab" sigma3^ab.  Rows with a signed operator hold for s = +1 and
// s = -1; on the right '=' is A_s^{li,lj}, '~' is A_{-s}^{li,lj} and '3' the
// Cartan A3^{li,lj} = (n_li - n_lj)/2.

#include <string>
#include <vector>

#include "symlind/collective.hpp"
#include "symlind/liouville.hpp"
#include "symlind/sym_basis.hpp"

namespace symlind {

struct AppendixTerm {
  double coeff;
  const char* li;
  const char* lj;
  char kind;
};

inline bool appendix_signed_label(const std::string& l) { return l.back() == '=' || l.back() == '~'; }

struct AppendixRow {
  const char* u;
  const char* v;
  std::vector<AppendixTerm> rhs;

  bool is_signed() const { return appendix_signed_label(u) || appendix_signed_label(v); }
};

inline const std::vector<AppendixRow>& appendix_rows() {
  static const std::vector<AppendixRow> rows = {
      {"I", "10=", {{1.0, "11", "10", '~'}, {1.0, "01", "00", '~'}, {1.0, "21", "20", '~'}}},
      {"10=", "I", {{1.0, "12", "02", '='}, {1.0, "11", "01", '='}, {1.0, "10", "00", '='}}},
      {"I", "21=", {{1.0, "22", "21", '~'}, {1.0, "12", "11", '~'}, {1.0, "02", "01", '~'}}},
      {"21=", "I", {{1.0, "21", "11", '='}, {1.0, "20", "10", '='}, {1.0, "22", "12", '='}}},
      {"20=", "I", {{1.0, "21", "01", '='}, {1.0, "20", "00", '='}, {1.0, "22", "02", '='}}},
      {"I", "20=", {{1.0, "22", "20", '~'}, {1.0, "12", "10", '~'}, {1.0, "02", "00", '~'}}},
      {"20=", "302", {{0.5, "22", "02", '='}, {-0.5, "20", "00", '='}}},
      {"302", "20=", {{0.5, "22", "20", '~'}, {-0.5, "02", "00", '~'}}},
      {"21=", "302", {{0.5, "22", "12", '='}, {-0.5, "20", "10", '='}}},
      {"302", "21=", {{0.5, "22", "21", '~'}, {-0.5, "02", "01", '~'}}},
      {"21=", "21~", {{1.0, "22", "11", '='}}},
      {"21=", "20~", {{1.0, "22", "10", '='}}},
      {"20=", "21~", {{1.0, "22", "01", '='}}},
      {"20=", "20~", {{1.0, "22", "00", '='}}},
      {"21=", "21=", {{1.0, "21", "12", '='}}},
      {"21=", "10~", {{1.0, "21", "10", '='}}},
      {"20=", "21=", {{1.0, "21", "02", '='}}},
      {"20=", "10~", {{1.0, "21", "00", '='}}},
      {"21=", "20=", {{1.0, "20", "12", '='}}},
      {"21=", "10=", {{1.0, "20", "11", '='}}},
      {"10=", "302", {{0.5, "12", "02", '='}, {-0.5, "10", "00", '='}}},
      {"302", "10=", {{0.5, "21", "20", '~'}, {-0.5, "01", "00", '~'}}},
      {"10=", "312", {{0.5, "12", "02", '='}, {-0.5, "11", "01", '='}}},
      {"312", "10=", {{0.5, "21", "20", '~'}, {-0.5, "11", "10", '~'}}},
      {"312", "20=", {{0.5, "22", "20", '~'}, {-0.5, "12", "10", '~'}}},
      {"20=", "312", {{0.5, "22", "02", '='}, {-0.5, "21", "01", '='}}},
      {"312", "21=", {{0.5, "22", "21", '~'}, {-0.5, "12", "11", '~'}}},
      {"21=", "312", {{0.5, "22", "12", '='}, {-0.5, "21", "11", '='}}},
      {"20=", "20=", {{1.0, "20", "02", '='}}},
      {"20=", "10=", {{1.0, "20", "01", '='}}},
      {"10=", "21~", {{1.0, "12", "01", '='}}},
      {"10=", "20~", {{1.0, "12", "00", '='}}},
      {"10=", "21=", {{1.0, "11", "02", '='}}},
      {"10=", "10~", {{1.0, "11", "00", '='}}},
      {"10=", "20=", {{1.0, "10", "02", '='}}},
      {"10=", "10=", {{1.0, "10", "01", '='}}},
      {"312", "302", {{-0.5, "21", "01", '3'}, {-0.5, "20", "10", '3'}, {0.5, "11", "02", '3'}, {0.5, "02", "01", '3'}, {0.5, "22", "11", '3'}, {0.5, "21", "12", '3'}}},
      {"I", "302", {{-1.0, "21", "01", '3'}, {-1.0, "20", "10", '3'}, {2.0, "12", "10", '3'}, {1.0, "02", "01", '3'}, {1.0, "22", "00", '3'}, {1.0, "21", "12", '3'}}},
      {"302", "312", {{-0.5, "21", "01", '3'}, {0.5, "11", "02", '3'}, {0.5, "22", "11", '3'}}},
      {"312", "I", {{1.0, "20", "10", '3'}, {1.0, "22", "11", '3'}, {1.0, "21", "12", '3'}}},
      {"302", "I", {{2.0, "21", "01", '3'}, {1.0, "20", "10", '3'}, {-1.0, "12", "10", '3'}, {-1.0, "02", "01", '3'}, {1.0, "22", "00", '3'}, {-1.0, "21", "12", '3'}}},
      {"I", "312", {{1.0, "02", "01", '3'}, {1.0, "22", "11", '3'}, {-1.0, "21", "12", '3'}}},
      {"312", "312", {{-1.0, "21", "01", '3'}, {1.0, "11", "02", '3'}, {1.0, "02", "01", '3'}, {0.5, "22", "11", '3'}, {0.5, "21", "12", '3'}}},
      {"302", "302", {{0.5, "12", "10", '3'}, {0.5, "02", "01", '3'}, {0.5, "21", "12", '3'}, {-0.5, "21", "01", '3'}, {-0.5, "20", "10", '3'}, {-0.5, "22", "00", '3'}, {1.0, "11", "02", '3'}, {1.0, "22", "11", '3'}}},
  };
  return rows;
}

namespace detail {

inline Operator appendix_operator(const std::string& label, int sign) {
  constexpr int m = 3;
  if (label == "I") return Operator::Identity(m, m);
  if (label[0] == '3') return sigma3(label[1] - '0', label[2] - '0', m);
  const int i = label[0] - '0', j = label[1] - '0';
  const int s = label[2] == '=' ? sign : -sign;
  return s > 0 ? sigma_plus(i, j, m) : sigma_minus(i, j, m);
}

inline HopTermList appendix_rhs(const AppendixRow& row, int sign) {
  constexpr int m = 3;
  HopTermList out(m, {});
  for (const auto& t : row.rhs) {
    const int li = slot_of(t.li, m), lj = slot_of(t.lj, m);
    if (t.kind == '3') {
      out = out + cartan(li, lj, m, t.coeff);
    } else {
      const int s = t.kind == '=' ? sign : -sign;
      out = out + (s > 0 ? raising(li, lj, m, t.coeff) : lowering(li, lj, m, t.coeff));
    }
  }
  return out;
}

} // namespace detail

/// One checked identity of the table.
struct AppendixCheck {
  int row = 0;   // 1-based
  int sign = 0;  // +1 / -1, or 0 for unsigned rows
  double residual = 0.0;
};

/// Compares the symmetric-subspace matrices of bosonize(U^L V^R) and the
/// tabulated combination, for every row and sign.
inline std::vector<AppendixCheck> check_appendix_identities(const SymBasis& basis) {
  if (basis.levels() != 3) throw InvalidArgument("check_appendix_identities: needs M = 3");
  std::vector<AppendixCheck> out;
  const auto& rows = appendix_rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const AppendixRow& row = rows[r];
    const bool signed_row = row.is_signed();
    for (int sign : signed_row ? std::vector<int>{1, -1} : std::vector<int>{1}) {
      const SuperMatrix lhs =
          left_right_supermatrix(detail::appendix_operator(row.u, sign), detail::appendix_operator(row.v, sign));
      const SparseMatrix a = hop_matrix(bosonize(lhs), basis);
      const SparseMatrix b = hop_matrix(detail::appendix_rhs(row, sign), basis);
      out.push_back({static_cast<int>(r) + 1, signed_row ? sign : 0, max_abs_entry(SparseMatrix(a - b))});
    }
  }
  return out;
}

} // namespace symlind
