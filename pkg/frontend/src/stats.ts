/** Statistics mirrored from the analysis service, used to cross-check plotted values. */

export function mean(values: number[]): number {
  return values.reduce((acc, v) => acc + v, 0) / values.length;
}

export function pearson(xs: number[], ys: number[]): number {
  const n = xs.length;
  if (n < 3) throw new Error(`pearson needs >= 3 points, got ${n}`);
  const mx = mean(xs);
  const my = mean(ys);
  let sxx = 0;
  let syy = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    const dx = xs[i] - mx;
    const dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx === 0 || syy === 0) throw new Error("pearson undefined: zero variance");
  return sxy / Math.sqrt(sxx * syy);
}

/** Natural logs of strictly positive pairs; nonpositive pairs are dropped. */
export function logPairs(xs: number[], ys: number[]): { lx: number[]; ly: number[]; dropped: number } {
  const lx: number[] = [];
  const ly: number[] = [];
  let dropped = 0;
  for (let i = 0; i < xs.length; i++) {
    if (xs[i] > 0 && ys[i] > 0 && !Number.isNaN(xs[i]) && !Number.isNaN(ys[i])) {
      lx.push(Math.log(xs[i]));
      ly.push(Math.log(ys[i]));
    } else {
      dropped++;
    }
  }
  if (lx.length < 3) throw new Error(`log correlation needs >= 3 positive pairs, got ${lx.length}`);
  return { lx, ly, dropped };
}

/** Residuals of the least-squares fit y = a + b x. */
export function residualise(xs: number[], ys: number[]): number[] {
  const n = xs.length;
  if (n < 3) throw new Error(`residualise needs >= 3 points, got ${n}`);
  const mx = mean(xs);
  const my = mean(ys);
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx === 0) throw new Error("residualise undefined: zero predictor variance");
  const b = sxy / sxx;
  const a = my - b * mx;
  return ys.map((y, i) => y - (a + b * xs[i]));
}
