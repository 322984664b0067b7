#include "towerlab/afcheck.hpp"

#include "towerlab/errors.hpp"
#include "towerlab/quasitiling.hpp"

#include <algorithm>

namespace towerlab {

namespace {

ClopenSet union_of(const SystemPtr& sys, const std::vector<ClopenSet>& sets) {
  if (sets.empty()) return ClopenSet::empty(sys, sys->trivial());
  const Resolution r = common_resolution(sets);
  std::vector<CellId> cells;
  for (const auto& s : sets) {
    auto fine = s.refine(r);
    cells.insert(cells.end(), fine.cells().begin(), fine.cells().end());
  }
  return ClopenSet(sys, r, std::move(cells));
}

}  // namespace

ClopenSet remainder_set(const AFCertificate& cert) {
  std::vector<ClopenSet> prints;
  for (const auto& t : cert.castle.towers) prints.push_back(footprint(t));
  return union_of(cert.castle.system, prints).complement();
}

ClopenSet subshape_set(const AFCertificate& cert) {
  std::vector<ClopenSet> parts;
  for (std::size_t i = 0; i < cert.castle.towers.size() && i < cert.subshapes.size(); ++i)
    for (const auto& s : cert.subshapes[i]) parts.push_back(level(cert.castle.towers[i], s));
  return union_of(cert.castle.system, parts);
}

CertificateReport verify_certificate(const AFCertificate& cert) {
  if (!cert.castle.system) throw InvalidInput("certificate without a system");
  const auto& sys = *cert.castle.system;
  const Group& g = sys.group();
  CertificateReport report;
  if (cert.n < 1) throw InvalidInput("n must be positive");

  const CastleReport castle = verify_castle(cert.castle);
  report.castle_ok = castle.valid();
  if (!report.castle_ok) report.problems.push_back("castle levels or footprints overlap");

  report.invariance_ok = true;
  for (std::size_t i = 0; i < cert.castle.towers.size(); ++i) {
    const Rational d = folner_defect(g, cert.castle.towers[i].shape, cert.k);
    report.defects.push_back(d);
    if (!(d < cert.delta)) {
      report.invariance_ok = false;
      report.problems.push_back("tower " + std::to_string(i) + " shape defect " + to_string(d) +
                                " is not below " + to_string(cert.delta));
    }
  }

  report.diameter_ok = true;
  if (cert.diameter_resolution < 0 || cert.diameter_resolution > sys.max_level()) {
    report.diameter_ok = false;
    report.problems.push_back("diameter resolution out of range");
  } else {
    const Resolution lr = sys.level(cert.diameter_resolution);
    for (std::size_t i = 0; i < cert.castle.towers.size() && report.diameter_ok; ++i) {
      for (const auto& s : cert.castle.towers[i].shape) {
        const ClopenSet l = level(cert.castle.towers[i], s);
        const Resolution j = sys.join(l.resolution(), lr);
        std::vector<CellId> coarse;
        for (CellId c : l.refine(j).cells()) coarse.push_back(sys.coarsen(c, j, lr));
        std::sort(coarse.begin(), coarse.end());
        coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());
        if (coarse.size() > 1) {
          report.diameter_ok = false;
          report.problems.push_back("level " + to_string(s) + " of tower " + std::to_string(i) +
                                    " meets " + std::to_string(coarse.size()) + " cells of level " +
                                    std::to_string(cert.diameter_resolution));
          break;
        }
      }
    }
  }

  report.ratio_ok = cert.subshapes.size() == cert.castle.towers.size();
  if (!report.ratio_ok) report.problems.push_back("one subshape per tower is required");
  for (std::size_t i = 0; i < cert.subshapes.size() && i < cert.castle.towers.size(); ++i) {
    const auto& s = cert.castle.towers[i].shape;
    const auto& sp = cert.subshapes[i];
    if (!is_subset(sp, s)) {
      report.ratio_ok = false;
      report.problems.push_back("subshape " + std::to_string(i) + " is not inside its shape");
    }
    if (!(sp.size() * static_cast<std::size_t>(cert.n) < s.size())) {
      report.ratio_ok = false;
      report.problems.push_back("tower " + std::to_string(i) + ": |S'| = " + std::to_string(sp.size()) +
                                " is not below |S|/n = " + std::to_string(s.size()) + "/" +
                                std::to_string(cert.n));
    }
  }

  if (cert.witness.m != 0) {
    report.witness_ok = false;
    report.problems.push_back("remainder witness must have m = 0");
  } else {
    const WitnessReport w = verify_witness(remainder_set(cert), subshape_set(cert), cert.witness);
    report.witness_ok = w.ok();
    for (const auto& v : w.violations) report.problems.push_back("witness: " + v);
  }
  return report;
}

AFCertificate build_odometer_certificate(const SystemPtr& odometer, int k, int n,
                                         const FiniteGroupSet& kset, const Rational& delta) {
  const auto* odo = dynamic_cast<const ProfiniteOdometer*>(odometer.get());
  if (!odo) throw Unsupported("odometer certificates need a ProfiniteOdometer");
  if (n < 1) throw InvalidInput("n must be positive");
  if (delta <= 0) throw InvalidInput("delta must be positive");
  if (k < 0 || k > odo->depth()) throw InvalidInput("depth outside the ladder");
  const Group& g = odo->group();
  for (const auto& t : kset) g.validate(t);
  const ExactTiling tiling = exact_tiling_ladder(g, k);
  const Rational defect = folner_defect(g, tiling.shape, kset);
  if (!(defect < delta)) {
    throw InvarianceViolation("shape at depth " + std::to_string(k) + " has defect " + to_string(defect) +
                              " >= " + to_string(delta) + "; try a larger depth");
  }
  if (!(tiling.shape.size() > static_cast<std::size_t>(n))) {
    throw InvalidInput("shape of size " + std::to_string(tiling.shape.size()) +
                       " is too small for n = " + std::to_string(n));
  }
  AFCertificate cert;
  const Resolution r = odo->level(k);
  cert.castle = Castle{odometer, {Tower{ClopenSet::cell(odometer, r, 0), tiling.shape}}};
  cert.n = n;
  cert.k = kset;
  cert.delta = delta;
  cert.diameter_resolution = k;
  cert.subshapes = {FiniteGroupSet{g.identity()}};
  cert.witness = ComparisonWitness{0, r, {}};
  return cert;
}

ExactDecomposition exact_decomposition(const AFCertificate& cert, std::optional<Rational> delta_target) {
  const CertificateReport report = verify_certificate(cert);
  if (!report.ok()) {
    throw InvalidInput("certificate does not verify: " +
                       (report.problems.empty() ? std::string("unknown") : report.problems.front()));
  }
  const SystemPtr& sys = cert.castle.system;
  const Group& g = sys->group();
  ExactDecomposition out;
  out.delta_target = delta_target ? *delta_target : cert.delta * 2;
  const Rational needed = cert.delta + make_rational(2, cert.n);
  if (needed > out.delta_target) {
    throw InvarianceViolation("insufficient margin: delta + 2/n = " + to_string(needed) +
                              " exceeds the target " + to_string(out.delta_target));
  }

  std::vector<ClopenSet> images;
  for (const auto& p : cert.witness.pieces) images.push_back(p.cells.act(p.translation));

  out.castle.system = sys;
  for (std::size_t i = 0; i < cert.castle.towers.size(); ++i) {
    const Tower& tower = cert.castle.towers[i];
    const Castle split = images.empty() ? Castle{sys, {tower}}
                                        : refine_castle_to(Castle{sys, {tower}}, images);
    for (const auto& piece_tower : split.towers) {
      std::vector<GroupElement> added;
      for (const auto& s : cert.subshapes[i]) {
        const ClopenSet l = level(piece_tower, s);
        for (std::size_t u = 0; u < images.size(); ++u) {
          if (!l.intersects(images[u])) continue;
          if (!l.is_subset_of(images[u])) throw InternalError("refined level straddles a witness image");
          const GroupElement graft = g.multiply(g.inverse(cert.witness.pieces[u].translation), s);
          if (tower.shape.contains(graft)) throw InternalError("grafted element already in the shape");
          added.push_back(graft);
        }
      }
      FiniteGroupSet extra(added);
      if (extra.size() != added.size()) throw InternalError("graft map is not injective");
      out.castle.towers.push_back({piece_tower.base, unite(tower.shape, extra)});
      out.added.push_back(std::move(extra));
    }
  }

  const CastleReport check = verify_castle(out.castle);
  if (!check.partitions) throw InternalError("grafted castle does not partition X");

  for (std::size_t j = 0; j < out.castle.towers.size(); ++j) {
    const auto& ext = out.castle.towers[j].shape;
    const FiniteGroupSet orig = subtract(ext, out.added[j]);
    for (const auto& t : cert.k) {
      ShapeBound b;
      b.tower = j;
      b.t = t;
      b.original_defect = symmetric_difference(translate_left(g, t, orig), orig).size();
      b.added = out.added[j].size();
      b.extended_size = ext.size();
      b.extended_defect = symmetric_difference(translate_left(g, t, ext), ext).size();
      if (b.extended_defect > b.original_defect + 2 * b.added) {
        throw InternalError("extended shape breaks the symmetric-difference bound");
      }
      const Rational route = Rational(BigInt(b.original_defect + 2 * b.added));
      if (!(route < out.delta_target * Rational(BigInt(b.extended_size)))) {
        throw InvarianceViolation("tower " + std::to_string(j) + ": |tS symdiff S| + 2|S''| = " +
                                  to_string(route) + " is not below delta_target * |S~| = " +
                                  to_string(out.delta_target * Rational(BigInt(b.extended_size))));
      }
      out.bounds.push_back(b);
    }
  }
  return out;
}

}  // namespace towerlab
