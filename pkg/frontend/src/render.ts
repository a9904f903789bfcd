/**
 * Display-side geometry and statistics: the affine screen transform, the
 * per-column accumulation buffer behind the scatter display, and band
 * measurements taken directly on displayed columns.
 */

/**
 * Affine, invertible map between physical screen coordinates (meters,
 * centered on the optical axis) and display pixels. Columns cover
 * [-halfWidthM, halfWidthM] and rows cover [-halfHeightM, halfHeightM];
 * inverting a pixel returns the physical center of that pixel, so a
 * round trip lands within half a pixel of where it started.
 */
export class ScreenTransform {
  constructor(
    readonly widthPx: number,
    readonly heightPx: number,
    readonly halfWidthM: number,
    readonly halfHeightM: number,
  ) {
    if (
      !Number.isInteger(widthPx) ||
      !Number.isInteger(heightPx) ||
      widthPx <= 0 ||
      heightPx <= 0
    ) {
      throw new RangeError("pixel dimensions must be positive integers");
    }
    if (halfWidthM <= 0 || halfHeightM <= 0) {
      throw new RangeError("physical extents must be positive");
    }
  }

  get pixelsPerMeter(): number {
    return this.widthPx / (2 * this.halfWidthM);
  }

  /** Physical width of one column, in meters. */
  get pixelSizeM(): number {
    return (2 * this.halfWidthM) / this.widthPx;
  }

  colFor(xM: number): number {
    const col = Math.floor((xM + this.halfWidthM) * this.pixelsPerMeter);
    return Math.min(this.widthPx - 1, Math.max(0, col));
  }

  rowFor(yM: number): number {
    const scale = this.heightPx / (2 * this.halfHeightM);
    const row = Math.floor((yM + this.halfHeightM) * scale);
    return Math.min(this.heightPx - 1, Math.max(0, row));
  }

  /** Physical x of the center of a column. */
  xAt(col: number): number {
    return (col + 0.5) * this.pixelSizeM - this.halfWidthM;
  }

  yAt(row: number): number {
    return (row + 0.5) * ((2 * this.halfHeightM) / this.heightPx) - this.halfHeightM;
  }
}

/** Per-column hit counts for the scatter display; one increment per event. */
export class ScatterBuffer {
  readonly columns: Float64Array;
  count = 0;

  constructor(readonly widthPx: number) {
    this.columns = new Float64Array(widthPx);
  }

  add(col: number): void {
    if (!Number.isInteger(col) || col < 0 || col >= this.widthPx) {
      throw new RangeError(`column ${col} outside display`);
    }
    this.columns[col] += 1;
    this.count += 1;
  }

  reset(): void {
    this.columns.fill(0);
    this.count = 0;
  }
}

const SPACING_SCAN_POINTS = 2001;

/**
 * Measure the dominant band spacing of the displayed columns, in pixels.
 *
 * Hann-windowed periodogram over spacings within [0.7, 1.4] times the hint,
 * with parabolic refinement of the peak. The window suppresses leakage from
 * the broad envelope, whose spectrum would otherwise bias the peak.
 */
export function bandSpacingPx(columns: ArrayLike<number>, hintPx: number): number {
  const n = columns.length;
  if (!(hintPx > 0)) throw new RangeError("spacing hint must be positive");
  let total = 0;
  for (let c = 0; c < n; c++) total += columns[c];
  if (total <= 0) throw new RangeError("no events to measure");

  const windowed = new Float64Array(n);
  for (let c = 0; c < n; c++) {
    windowed[c] = columns[c] * (0.5 - 0.5 * Math.cos((2 * Math.PI * c) / (n - 1)));
  }

  const fLo = 1 / (1.4 * hintPx);
  const fHi = 1 / (0.7 * hintPx);
  const step = (fHi - fLo) / (SPACING_SCAN_POINTS - 1);
  const mags = new Float64Array(SPACING_SCAN_POINTS);
  let best = 0;
  for (let k = 0; k < SPACING_SCAN_POINTS; k++) {
    const f = fLo + k * step;
    let re = 0;
    let im = 0;
    for (let c = 0; c < n; c++) {
      const phase = 2 * Math.PI * f * c;
      re += windowed[c] * Math.cos(phase);
      im += windowed[c] * Math.sin(phase);
    }
    mags[k] = Math.hypot(re, im);
    if (mags[k] > mags[best]) best = k;
  }

  let f = fLo + best * step;
  if (best > 0 && best < SPACING_SCAN_POINTS - 1) {
    const a = mags[best - 1];
    const b = mags[best];
    const c = mags[best + 1];
    const denom = a - 2 * b + c;
    if (denom !== 0) f += (0.5 * (a - c)) / denom * step;
  }
  return 1 / f;
}

/**
 * Strength of banding at a known spacing: twice the magnitude of the mean
 * phasor of displayed columns. Near 1 for clean fringes at that spacing,
 * near 0 for a band-free distribution.
 */
export function bandStrength(columns: ArrayLike<number>, spacingPx: number): number {
  if (!(spacingPx > 0)) throw new RangeError("spacing must be positive");
  let re = 0;
  let im = 0;
  let total = 0;
  for (let c = 0; c < columns.length; c++) {
    const phase = (2 * Math.PI * c) / spacingPx;
    re += columns[c] * Math.cos(phase);
    im += columns[c] * Math.sin(phase);
    total += columns[c];
  }
  if (total <= 0) throw new RangeError("no events to measure");
  return (2 * Math.hypot(re, im)) / total;
}
