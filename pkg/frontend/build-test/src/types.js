// Payload shapes of the fairplan HTTP API. The dashboard never computes
// fairness numbers itself; everything rendered comes from these bodies.
export {};
