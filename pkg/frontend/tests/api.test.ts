import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function stubFetch(status: number, payload: unknown) {
  const calls: { input: string; init?: RequestInit }[] = [];
  const fetchFn = async (input: string, init?: RequestInit) => {
    calls.push({ input, init });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { calls, fetchFn };
}

describe("ApiClient", () => {
  it("posts extension requests with the documented body", async () => {
    const { calls, fetchFn } = stubFetch(200, { status: "awaiting-selection", iteration: null });
    const client = new ApiClient("http://svc", fetchFn);
    await client.extend("s-1", ["p2", "p1"], ["df", "conc"], 10);
    expect(calls).toHaveLength(1);
    expect(calls[0]!.input).toBe("http://svc/sessions/s-1/extend");
    expect(JSON.parse(String(calls[0]!.init?.body))).toEqual({
      pattern_ids: ["p2", "p1"],
      rules: ["df", "conc"],
      min_case_frequency: 10,
    });
  });

  it("omits optional extend fields when unset", async () => {
    const { calls, fetchFn } = stubFetch(200, { status: "awaiting-selection", iteration: null });
    await new ApiClient("", fetchFn).extend("s-1", ["p1"]);
    expect(JSON.parse(String(calls[0]!.init?.body))).toEqual({ pattern_ids: ["p1"] });
  });

  it("maps HTTP errors to ApiError with the service detail", async () => {
    const { fetchFn } = stubFetch(409, { detail: "a step is already in progress" });
    const client = new ApiClient("", fetchFn);
    try {
      await client.getSession("s-1");
      expect.unreachable("should have thrown");
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(409);
      expect((error as ApiError).message).toContain("in progress");
    }
  });

  it("maps network failures to status 0", async () => {
    const client = new ApiClient("", async () => {
      throw new TypeError("fetch failed");
    });
    await expect(client.getSession("s-1")).rejects.toMatchObject({ status: 0 });
  });

  it("encodes ids in paths", async () => {
    const { calls, fetchFn } = stubFetch(200, {});
    await new ApiClient("", fetchFn).dashboard("s 1", "p/1");
    expect(calls[0]!.input).toBe("/sessions/s%201/patterns/p%2F1/dashboard");
  });
});
