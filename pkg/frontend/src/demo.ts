/** Built-in demo instance: a three-stop corridor with two short lines.
 *
 * Matches the decision service's own demo fixture so the dashboard works out
 * of the box against an empty data directory.
 */

export const DEMO_DOC = {
  stops: [
    { id: "v1", x: 0.0, y: 0.0 },
    { id: "v2", x: 3.0, y: 0.0 },
    { id: "v3", x: 6.0, y: 0.0 },
  ],
  zones: [
    { id: "u1", x: 0.0, y: 1.0 },
    { id: "u2", x: 6.0, y: 1.0 },
  ],
  edges: [
    { a: "v1", b: "v2", cost: 3 },
    { a: "v2", b: "v3", cost: 3 },
  ],
  access: {
    matrix: [1, 2, 5, 5, 2, 1],
    zone_order: ["u1", "u2"],
    stop_order: ["v1", "v2", "v3"],
  },
  od: [{ o: "u1", d: "u2", n: 10 }],
  lines: [
    { id: "l1", stops: ["v1", "v2"] },
    { id: "l2", stops: ["v2", "v3"] },
  ],
  params: { p_elim: "3/5", alpha: 2, k: 2, time_scale: 1 },
};
